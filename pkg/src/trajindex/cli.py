"""Command-line front end: build, query, stats, bench, oracle-check.

Exit codes: 0 success, 1 usage error, 2 data or processing error.
"""

from __future__ import annotations

import argparse
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from trajindex.engine import TrajectoryIndex, build_index
from trajindex.ingest import NormalizeConfig, normalize, parse_binary, parse_csv
from trajindex.oracle import PositionTable, oracle_interval, oracle_slice
from trajindex.snapshot import Region


@dataclass(frozen=True)
class BenchSpec:
    """Workload shapes for the benchmark command.

    Region classes are fixed cell sizes (clamped to the grid when it is
    smaller); interval lengths pair with them.  Repetition counts follow
    the usual measurement protocol and can be scaled down for quick runs.
    """

    small_region: tuple[int, int] = (272, 367)
    large_region: tuple[int, int] = (2723, 3677)
    small_interval: int = 36
    large_interval: int = 90
    object_reps: int = 20_000
    trajectory_reps: int = 10_000
    range_reps: int = 1_000

    def scaled(self, factor: float) -> "BenchSpec":
        if factor <= 0:
            raise ValueError("scale must be positive")
        return BenchSpec(self.small_region, self.large_region,
                         self.small_interval, self.large_interval,
                         max(1, int(self.object_reps * factor)),
                         max(1, int(self.trajectory_reps * factor)),
                         max(1, int(self.range_reps * factor)))


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad flags; the contract reserves 2 for data
    # errors, so remap usage problems to 1
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(1)


def _build_parser() -> _Parser:
    parser = _Parser(prog="trajindex", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    b = sub.add_parser("build", help="build an index file from raw reports")
    b.add_argument("--input", required=True)
    b.add_argument("--format", choices=("csv", "bin"), default="csv")
    b.add_argument("--period", type=int, default=120)
    b.add_argument("--leaf-size", type=int, default=80)
    b.add_argument("--output", required=True)
    b.add_argument("--normalize", action="store_true",
                   help="speed-filter and gap-fill reports before indexing")

    q = sub.add_parser("query", help="query a saved index")
    q.add_argument("index")
    q.add_argument("--object", type=int)
    q.add_argument("--region", help="X1,X2,Y1,Y2 inclusive cell bounds")
    q.add_argument("--from", dest="first", type=int, required=True)
    q.add_argument("--to", dest="last", type=int)

    s = sub.add_parser("stats", help="print size breakdown of an index file")
    s.add_argument("index")

    n = sub.add_parser("bench", help="run the measurement workload, emit CSV")
    n.add_argument("index")
    n.add_argument("--seed", type=int, default=0)
    n.add_argument("--scale", type=float, default=1.0,
                   help="multiply the canonical repetition counts")
    n.add_argument("--threads", type=int, default=1,
                   help="fan queries out across threads (throughput mode)")
    n.add_argument("--output", help="write CSV here instead of stdout")

    o = sub.add_parser("oracle-check",
                       help="build from raw reports and cross-check random "
                            "queries against a linear-scan oracle")
    o.add_argument("--input", required=True)
    o.add_argument("--format", choices=("csv", "bin"), default="csv")
    o.add_argument("--period", type=int, default=120)
    o.add_argument("--leaf-size", type=int, default=80)
    o.add_argument("--seed", type=int, default=0)
    o.add_argument("--queries", type=int, default=300)
    return parser


def _read_records(path: str, fmt: str):
    if fmt == "bin":
        with open(path, "rb") as fh:
            return parse_binary(fh.read())
    with open(path, "r") as fh:
        return parse_csv(fh)


def _print_breakdown(ix: TrajectoryIndex, out) -> None:
    parts = ix.component_bytes()
    total = len(ix.to_bytes())
    overhead = total - sum(parts.values())
    baseline = 9 * ix.sample_count
    print(f"objects: {len(ix.object_ids)}", file=out)
    print(f"samples: {ix.sample_count}", file=out)
    print(f"horizon: {ix.horizon}  period: {ix.period}  "
          f"leaf-size: {ix.leaf_capacity}  max-speed: {ix.max_speed}", file=out)
    for name in ("snapshots", "logs", "trees"):
        print(f"{name}: {parts[name]} bytes", file=out)
    print(f"tables: {overhead} bytes", file=out)
    print(f"total: {total} bytes", file=out)
    print(f"baseline (9 B/record): {baseline} bytes", file=out)
    print(f"ratio: {total / baseline:.4f}", file=out)


def _cmd_build(args) -> int:
    records = _read_records(args.input, args.format)
    if args.normalize:
        records = normalize(records, NormalizeConfig())
    rows = sorted((r.object_id, r.instant, r.x, r.y) for r in records)
    if not rows:
        raise ValueError("no records in input")
    extent = (max(r[2] for r in rows) + 1, max(r[3] for r in rows) + 1)
    ix = build_index(rows, period=args.period, leaf_capacity=args.leaf_size,
                     extent=extent)
    ix.save(args.output)
    _print_breakdown(ix, sys.stdout)
    return 0


def _parse_region(text: str) -> Region:
    parts = text.split(",")
    if len(parts) != 4:
        raise ValueError("region must be X1,X2,Y1,Y2")
    x1, x2, y1, y2 = (int(p) for p in parts)
    return Region(x1, x2, y1, y2)


def _cmd_query(args, parser: _Parser) -> int:
    if (args.object is None) == (args.region is None):
        parser.error("exactly one of --object or --region is required")
    ix = TrajectoryIndex.load(args.index)
    if args.object is not None:
        if args.last is None:
            pos = ix.object_position(args.object, args.first)
            if pos is not None:
                print(f"x={pos[0]} y={pos[1]}")
        else:
            for t, x, y in ix.trajectory(args.object, args.first, args.last):
                print(f"t={t} x={x} y={y}")
    else:
        region = _parse_region(args.region)
        if args.last is None:
            for oid, x, y in ix.time_slice(region, args.first):
                print(f"id={oid} x={x} y={y}")
        else:
            for oid in ix.time_interval(region, args.first, args.last):
                print(f"id={oid}")
    return 0


def _cmd_stats(args) -> int:
    _print_breakdown(TrajectoryIndex.load(args.index), sys.stdout)
    return 0


def _clamped_region(rng, extent, size) -> Region:
    w = min(size[0], extent[0])
    h = min(size[1], extent[1])
    x1 = int(rng.integers(0, extent[0] - w + 1))
    y1 = int(rng.integers(0, extent[1] - h + 1))
    return Region(x1, x1 + w - 1, y1, y1 + h - 1)


def bench_queries(ix: TrajectoryIndex, spec: BenchSpec, seed: int):
    """The six measured classes with their deterministic query streams."""
    rng = np.random.default_rng(seed)
    ids = ix.object_ids
    horizon = ix.horizon

    def instants(count):
        return rng.integers(0, horizon, size=count)

    def windows(count, length):
        first = rng.integers(0, max(1, horizon - length), size=count)
        return [(int(b), min(int(b) + length - 1, horizon - 1)) for b in first]

    object_qs = [(ids[int(i)], int(q)) for i, q in
                 zip(rng.integers(0, len(ids), size=spec.object_reps),
                     instants(spec.object_reps))]
    yield ("object", f"n={spec.object_reps}",
           [lambda oid=oid, q=q: ix.object_position(oid, q)
            for oid, q in object_qs])
    traj_qs = [(ids[int(i)], w) for i, w in
               zip(rng.integers(0, len(ids), size=spec.trajectory_reps),
                   windows(spec.trajectory_reps, spec.large_interval))]
    yield ("trajectory", f"len={spec.large_interval},n={spec.trajectory_reps}",
           [lambda oid=oid, w=w: ix.trajectory(oid, w[0], w[1])
            for oid, w in traj_qs])
    for label, size in (("S", spec.small_region), ("L", spec.large_region)):
        slice_qs = [(_clamped_region(rng, ix.extent, size), int(q))
                    for q in instants(spec.range_reps)]
        yield (f"slice-{label}", f"region={size[0]}x{size[1]},n={spec.range_reps}",
               [lambda r=r, q=q: ix.time_slice(r, q) for r, q in slice_qs])
    for label, size, length in (("S", spec.small_region, spec.small_interval),
                                ("L", spec.large_region, spec.large_interval)):
        iv_qs = [(_clamped_region(rng, ix.extent, size), w)
                 for w in windows(spec.range_reps, length)]
        yield (f"interval-{label}",
               f"region={size[0]}x{size[1]},len={length},n={spec.range_reps}",
               [lambda r=r, w=w: ix.time_interval(r, w[0], w[1])
                for r, w in iv_qs])


def _cmd_bench(args) -> int:
    ix = TrajectoryIndex.load(args.index)
    spec = BenchSpec().scaled(args.scale)
    space = len(ix.to_bytes())
    lines = ["class,config,reps,mean_us,space_bytes"]
    for name, config, calls in bench_queries(ix, spec, args.seed):
        start = time.perf_counter()
        if args.threads > 1:
            with ThreadPoolExecutor(max_workers=args.threads) as pool:
                for _ in pool.map(lambda c: c(), calls):
                    pass
        else:
            for call in calls:
                call()
        elapsed = time.perf_counter() - start
        mean_us = 1e6 * elapsed / len(calls)
        lines.append(f"{name},\"{config}\",{len(calls)},{mean_us:.2f},{space}")
    text = "\n".join(lines) + "\n"
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_oracle_check(args) -> int:
    records = _read_records(args.input, args.format)
    rows = sorted((r.object_id, r.instant, r.x, r.y) for r in records)
    if not rows:
        raise ValueError("no records in input")
    extent = (max(r[2] for r in rows) + 1, max(r[3] for r in rows) + 1)
    ix = build_index(rows, period=args.period, leaf_capacity=args.leaf_size,
                     extent=extent)
    table = PositionTable.from_samples(rows)
    rng = np.random.default_rng(args.seed)
    ids = ix.object_ids
    bad = 0
    for n in range(args.queries):
        kind = n % 3
        if kind == 0:
            oid = ids[int(rng.integers(0, len(ids)))]
            q = int(rng.integers(0, ix.horizon))
            got, want = ix.object_position(oid, q), table.position(oid, q)
            desc = f"object {oid} at {q}"
        else:
            x1 = int(rng.integers(0, extent[0]))
            y1 = int(rng.integers(0, extent[1]))
            x2 = min(extent[0] - 1, x1 + int(rng.integers(0, extent[0] // 4 + 1)))
            y2 = min(extent[1] - 1, y1 + int(rng.integers(0, extent[1] // 4 + 1)))
            region = Region(x1, x2, y1, y2)
            if kind == 1:
                q = int(rng.integers(0, ix.horizon))
                got = ix.time_slice(region, q)
                want = oracle_slice(table, (x1, x2, y1, y2), q)
                desc = f"slice {region} at {q}"
            else:
                b = int(rng.integers(0, ix.horizon))
                e = min(ix.horizon - 1, b + int(rng.integers(0, 100)))
                got = ix.time_interval(region, b, e)
                want = oracle_interval(table, (x1, x2, y1, y2), b, e)
                desc = f"interval {region} over {b}..{e}"
        if got != want:
            bad += 1
            print(f"MISMATCH {desc}: index={got!r} oracle={want!r}",
                  file=sys.stderr)
    if bad:
        raise ValueError(f"{bad} of {args.queries} queries disagree with the oracle")
    print(f"ok: {args.queries} queries match the oracle")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "build":
            return _cmd_build(args)
        if args.command == "query":
            return _cmd_query(args, parser)
        if args.command == "stats":
            return _cmd_stats(args)
        if args.command == "bench":
            return _cmd_bench(args)
        return _cmd_oracle_check(args)
    except SystemExit:
        raise
    except (ValueError, KeyError, IndexError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
