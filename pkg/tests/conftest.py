import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

# acceptance tests append their verdict lines here; the summary hook prints
# them after the run, outside pytest's output capture
ACCEPTANCE_VERDICTS: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_VERDICTS:
        terminalreporter.section("acceptance")
        for line in ACCEPTANCE_VERDICTS:
            terminalreporter.write_line(line)

# one object wandering inside a single 13-instant period, with a two-instant
# dropout; small enough to verify by hand, rich enough to exercise gaps,
# negative steps and entrant handling
REF_TRACK = [(2, 2, 4), (3, 3, 6), (4, 5, 7), (5, 3, 5),
             (8, 10, 8), (9, 9, 10), (10, 8, 9)]
REF_OBJECT = 7
REF_PERIOD = 13


@pytest.fixture
def ref_track():
    return list(REF_TRACK)


@pytest.fixture
def ref_rows():
    return [(REF_OBJECT, t, x, y) for t, x, y in REF_TRACK]
