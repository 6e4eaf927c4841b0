import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import REF_PERIOD, REF_TRACK
from trajindex.log import TimeIndex, TrajectoryLog, build_log


@pytest.fixture
def ref_log(ref_track):
    return build_log(ref_track, 0, REF_PERIOD, object_id=7)


def random_track(rng, period, start=0, max_step=6, base=500):
    count = int(rng.integers(1, period))
    ts = start + 1 + np.sort(rng.choice(period - 1, size=count, replace=False))
    xs = base + np.cumsum(rng.integers(-max_step, max_step + 1, size=count))
    ys = base + np.cumsum(rng.integers(-max_step, max_step + 1, size=count))
    return list(zip(ts.tolist(), xs.tolist(), ys.tolist()))


class TestTimeIndex:
    def test_dense_window(self):
        ti = TimeIndex(2, 10, [5, 6])
        assert len(ti) == 9
        assert ti.gap_count == 2 and ti.data_count == 7
        assert ti.is_gap(5) and not ti.is_gap(4)
        assert ti.gaps_upto(8) == 2
        assert ti.data_offset(5) == 7
        assert list(ti.data_offsets(3)) == [3, 4, 7, 8, 9]
        assert not ti._sparse  # 2 gaps in 9 slots is not sparse territory

    def test_sparse_representation_kicks_in_below_ten_percent(self):
        mostly_full = TimeIndex(1, 100, [50])
        assert mostly_full._sparse
        boundary = TimeIndex(1, 100, list(range(2, 12)))  # exactly 10%
        assert not boundary._sparse
        assert mostly_full.data_count == 99
        assert boundary.data_count == 90

    def test_round_trip_both_kinds(self):
        for gaps in ([7], list(range(2, 30, 2))):
            ti = TimeIndex(3, 40, gaps)
            back, _ = TimeIndex.from_buffer(ti.to_bytes())
            assert back.to_bytes() == ti.to_bytes()
            assert back.first == 3 and back.last == 40
            assert back.gap_count == len(gaps)


class TestReferenceTrack:
    def test_window_and_gaps(self, ref_log):
        assert (ref_log.time.first, ref_log.time.last) == (2, 10)
        assert ref_log.data_count == 7
        assert ref_log.time.gap_count == 2

    def test_extraction_steps_at_instant_nine(self, ref_log):
        # offset 8 in the window, two gaps before it, hence data ordinal 6;
        # four non-negative x-steps among the first six, so x = 12 - 3 = 9
        off = 9 - ref_log.time.first + 1
        assert ref_log.time.gaps_upto(off) == 2
        ordinal = off - 2
        assert ordinal == 6
        assert ref_log.dx.sign.rank1(ordinal) == 4
        assert ref_log.dx.pos.prefix_sum(4) == 12
        assert ref_log.dx.neg.prefix_sum(2) == 3
        assert ref_log.position(9) == (9, 10)

    def test_every_sample_reproduced(self, ref_log):
        for t, x, y in REF_TRACK:
            assert ref_log.position(t) == (x, y)

    def test_gaps_and_edges_return_none(self, ref_log):
        for t in (1, 6, 7, 11, 12):
            assert ref_log.position(t) is None

    def test_instant_ordinal_maps(self, ref_log):
        assert ref_log.map_instant(9) == 6
        assert ref_log.map_instant(1) == 0
        assert ref_log.map_instant(12) == 7
        assert ref_log.unmap_ordinal(5) == 8
        assert ref_log.unmap_ordinal(1) == 2
        assert ref_log.unmap_ordinal(7) == 10

    def test_scan_window(self, ref_log):
        assert ref_log.scan_positions(3, 4) == [(4, 5, 7), (5, 3, 5)]
        assert ref_log.scan_positions(1, 7) == list(REF_TRACK)

    def test_round_trip(self, ref_log):
        back, _ = TrajectoryLog.from_buffer(ref_log.to_bytes(), 0, REF_PERIOD)
        assert back.to_bytes() == ref_log.to_bytes()
        assert back.object_id == 7
        assert back.position(9) == (9, 10)


class TestBuildValidation:
    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            build_log([], 0, 13)

    def test_rejects_out_of_period(self):
        with pytest.raises(ValueError):
            build_log([(0, 1, 1)], 0, 13)
        with pytest.raises(ValueError):
            build_log([(13, 1, 1)], 0, 13)
        build_log([(12, 1, 1)], 0, 13)  # last in-period instant is fine

    def test_rejects_unsorted(self):
        with pytest.raises(ValueError):
            build_log([(3, 1, 1), (2, 1, 1)], 0, 13)
        with pytest.raises(ValueError):
            build_log([(3, 1, 1), (3, 2, 2)], 0, 13)

    def test_position_domain(self, ref_log):
        with pytest.raises(IndexError):
            ref_log.position(0)
        with pytest.raises(IndexError):
            ref_log.position(13)
        with pytest.raises(IndexError):
            ref_log.scan_positions(0, 3)
        with pytest.raises(IndexError):
            ref_log.scan_positions(3, 8)


class TestRandomTracks:
    def test_replay_and_maps(self):
        rng = np.random.default_rng(77)
        for trial in range(200):
            period = int(rng.integers(2, 50))
            start = int(rng.integers(0, 4)) * period
            rows = random_track(rng, period, start)
            log = build_log(rows, start, period)
            table = {t - start: (x, y) for t, x, y in rows}
            for i in range(1, period):
                assert log.position(i) == table.get(i)
            count = log.data_count
            assert [log.unmap_ordinal(j) for j in range(1, count + 1)] == \
                sorted(table)
            for j in range(1, count + 1):
                assert log.map_instant(log.unmap_ordinal(j)) == j

    def test_scan_agrees_with_pointwise(self):
        rng = np.random.default_rng(78)
        for trial in range(60):
            period = int(rng.integers(3, 80))
            rows = random_track(rng, period)
            log = build_log(rows, 0, period)
            full = log.scan_positions(1, log.data_count)
            assert full == [(t, x, y) for t, x, y in rows]
            a = int(rng.integers(1, log.data_count + 1))
            b = int(rng.integers(a, log.data_count + 1))
            assert log.scan_positions(a, b) == full[a - 1:b]

    @given(st.integers(0, 10**6))
    @settings(max_examples=40, deadline=None)
    def test_single_sample_log(self, seed):
        rng = np.random.default_rng(seed)
        period = int(rng.integers(2, 20))
        t = int(rng.integers(1, period))
        log = build_log([(t, 42, 97)], 0, period)
        assert log.position(t) == (42, 97)
        assert log.data_count == 1
        assert log.unmap_ordinal(1) == t

    def test_round_trip_random(self):
        rng = np.random.default_rng(79)
        for trial in range(40):
            period = int(rng.integers(2, 60))
            rows = random_track(rng, period)
            log = build_log(rows, 0, period)
            back, _ = TrajectoryLog.from_buffer(log.to_bytes(), 0, period)
            assert back.to_bytes() == log.to_bytes()

    def test_space_bound(self):
        # total payload bits within 4 * (n log2(N/n + 2) + d + 64), with N
        # the total absolute x-movement
        rng = np.random.default_rng(80)
        for trial in range(60):
            period = int(rng.integers(2, 400))
            rows = random_track(rng, period, max_step=int(rng.integers(1, 30)))
            log = build_log(rows, 0, period)
            n = log.data_count
            n_move = log.dx.pos.total + log.dx.neg.total
            budget = 4 * (n * math.log2(n_move / n + 2) + period + 64)
            assert log.code_bits() <= budget, (trial, log.code_bits(), budget)
