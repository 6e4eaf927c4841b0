"""Heap-ordered bounding-box trees over log ordinals.

Leaves cover fixed-size runs of data ordinals; the leaf level is padded to
a power of two so node p has children 2p and 2p+1 with no pointers.  Only
the root box is stored outright.  Every other node keeps four non-negative
differences against its parent (min grows, max shrinks as you descend),
packed at the width of the largest difference in the tree.

Interval search walks the tree pruning on time coverage, box overlap and a
reachability bound: if a box sits further from the query region than the
object can travel in the time remaining, the subtree cannot produce a hit.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

from trajindex.log import TrajectoryLog
from trajindex.succinct import PackedIntArray, read_frame, write_frame


@dataclass(frozen=True)
class Mbr:
    xmin: int
    xmax: int
    ymin: int
    ymax: int

    def intersects(self, other: "Mbr") -> bool:
        return (self.xmin <= other.xmax and other.xmin <= self.xmax
                and self.ymin <= other.ymax and other.ymin <= self.ymax)

    def contains(self, x: int, y: int) -> bool:
        return self.xmin <= x <= self.xmax and self.ymin <= y <= self.ymax

    def union(self, other: "Mbr") -> "Mbr":
        return Mbr(min(self.xmin, other.xmin), max(self.xmax, other.xmax),
                   min(self.ymin, other.ymin), max(self.ymax, other.ymax))

    def gap_to(self, other: "Mbr") -> int:
        """Chebyshev distance between the boxes, 0 when they touch."""
        gx = max(0, other.xmin - self.xmax, self.xmin - other.xmax)
        gy = max(0, other.ymin - self.ymax, self.ymin - other.ymax)
        return max(gx, gy)


def _point_gap(r: Mbr, x: int, y: int) -> int:
    return max(0, r.xmin - x, x - r.xmax, r.ymin - y, y - r.ymax)


class TraversalStats:
    """Counters for one or more searches; events recorded only when traced."""

    def __init__(self, trace: bool = False):
        self.nodes_visited = 0
        self.positions_decoded = 0
        self.events: list[tuple[str, int]] | None = [] if trace else None

    def event(self, kind: str, node: int) -> None:
        if self.events is not None:
            self.events.append((kind, node))


class MbrTree:
    """Bounding boxes over one log, heap order, differential storage."""

    def __init__(self, leaf_capacity: int, leaf_count: int, data_count: int,
                 width: int, root: Mbr, diffs_x: PackedIntArray,
                 diffs_y: PackedIntArray):
        self.leaf_capacity = leaf_capacity
        self.leaf_count = leaf_count
        self.data_count = data_count
        self.width = width
        self.root = root
        self._diffs_x = diffs_x
        self._diffs_y = diffs_y

    @property
    def node_count(self) -> int:
        return 2 * self.leaf_count - 1

    def coverage(self, p: int) -> tuple[int, int] | None:
        """Ordinal range a node covers, clipped to real data, or None."""
        if not 1 <= p <= self.node_count:
            raise IndexError(f"node {p} out of range 1..{self.node_count}")
        depth = p.bit_length() - 1
        span = (self.leaf_count >> depth) * self.leaf_capacity
        idx = p - (1 << depth)
        lo = idx * span + 1
        if lo > self.data_count:
            return None
        return lo, min(lo + span - 1, self.data_count)

    def child_box(self, parent: Mbr, p: int) -> Mbr:
        base = 2 * (p - 2)
        dx, dy = self._diffs_x, self._diffs_y
        return Mbr(parent.xmin + dx[base], parent.xmax - dx[base + 1],
                   parent.ymin + dy[base], parent.ymax - dy[base + 1])

    def node_box(self, p: int) -> Mbr:
        """Reconstruct the box of node p by walking down from the root."""
        if self.coverage(p) is None:
            raise ValueError(f"node {p} covers no data")
        box = self.root
        for shift in range(p.bit_length() - 2, -1, -1):
            box = self.child_box(box, p >> shift)
        return box

    def first_hit(self, log: TrajectoryLog, region: Mbr, ord_lo: int,
                  ord_hi: int, max_speed: int, t_lo: int, t_hi: int, *,
                  mbr_prune: bool = True, speed_prune: bool = True,
                  stats: TraversalStats | None = None) -> int | None:
        """Earliest local instant in ordinals ord_lo..ord_hi whose position
        falls inside region, or None.

        t_lo/t_hi are the local instants bounding the query window; they
        only feed the reachability pruning.
        """
        if not 1 <= ord_lo <= ord_hi <= self.data_count:
            raise IndexError("ordinal window out of range")
        if stats is None:
            stats = TraversalStats()
        return self._search(1, self.root, log, region, ord_lo, ord_hi,
                            max_speed, t_lo, t_hi, mbr_prune, speed_prune,
                            stats)

    def intersects_interval(self, log: TrajectoryLog, region: Mbr,
                            ord_lo: int, ord_hi: int, max_speed: int,
                            t_lo: int, t_hi: int, **kwargs) -> bool:
        hit = self.first_hit(log, region, ord_lo, ord_hi, max_speed,
                             t_lo, t_hi, **kwargs)
        return hit is not None

    def _search(self, p, box, log, r, olo, ohi, s, tlo, thi,
                mbr_prune, speed_prune, stats) -> int | None:
        stats.nodes_visited += 1
        stats.event("visit", p)
        if mbr_prune and not box.intersects(r):
            stats.event("mbr_reject", p)
            return None
        if p >= self.leaf_count:
            return self._scan_leaf(p, log, r, olo, ohi, s, speed_prune, stats)
        left, right = 2 * p, 2 * p + 1
        lcov = self.coverage(left)
        rcov = self.coverage(right)
        l_hit = lcov[0] <= ohi and olo <= lcov[1]
        r_hit = rcov is not None and rcov[0] <= ohi and olo <= rcov[1]
        if l_hit and r_hit:
            found = self._search(left, self.child_box(box, left), log, r,
                                 olo, ohi, s, tlo, thi, mbr_prune,
                                 speed_prune, stats)
            if found is not None:
                return found
            return self._search(right, self.child_box(box, right), log, r,
                                olo, ohi, s, tlo, thi, mbr_prune,
                                speed_prune, stats)
        if r_hit:
            # the query window starts after the left subtree; if the object
            # cannot close the gap between where it was and the region in
            # the time available, the right subtree is unreachable
            if speed_prune:
                left_end = log.unmap_ordinal(lcov[1])
                latest = min(thi, log.unmap_ordinal(min(rcov[1], ohi)))
                gap = self.child_box(box, left).gap_to(r)
                if gap > s * (latest - left_end):
                    stats.event("speed_skip", right)
                    return None
            stats.event("time_skip", left)
            return self._search(right, self.child_box(box, right), log, r,
                                olo, ohi, s, tlo, thi, mbr_prune,
                                speed_prune, stats)
        if l_hit:
            # mirrored bound: the object must reach the right subtree's box
            # from wherever it is during the query window
            if speed_prune and rcov is not None:
                right_start = log.unmap_ordinal(rcov[0])
                earliest = max(tlo, log.unmap_ordinal(max(lcov[0], olo)))
                gap = self.child_box(box, right).gap_to(r)
                if gap > s * (right_start - earliest):
                    stats.event("speed_skip", left)
                    return None
            if rcov is not None:
                stats.event("time_skip", right)
            return self._search(left, self.child_box(box, left), log, r,
                                olo, ohi, s, tlo, thi, mbr_prune,
                                speed_prune, stats)
        return None

    def _scan_leaf(self, p, log, r, olo, ohi, s, speed_prune, stats) -> int | None:
        cov = self.coverage(p)
        lo, hi = max(cov[0], olo), min(cov[1], ohi)
        last_t = log.unmap_ordinal(hi)
        for t, x, y in log.iter_positions(lo, hi):
            stats.positions_decoded += 1
            if r.contains(x, y):
                stats.event("hit", p)
                return t
            if speed_prune and _point_gap(r, x, y) > s * (last_t - t):
                stats.event("leaf_abort", p)
                break
        return None

    def code_bits(self) -> int:
        return self._diffs_x.code_bits() + self._diffs_y.code_bits()

    def to_bytes(self) -> bytes:
        payload = struct.pack("<BIIBiiii", 1, self.leaf_capacity,
                              self.leaf_count, self.width, self.root.xmin,
                              self.root.xmax, self.root.ymin, self.root.ymax)
        payload += self._diffs_x.to_bytes()
        payload += self._diffs_y.to_bytes()
        return write_frame(payload)

    @classmethod
    def from_buffer(cls, buf, offset: int, data_count: int) -> tuple["MbrTree", int]:
        payload, end = read_frame(buf, offset)
        version, cap, leaves, width, x1, x2, y1, y2 = struct.unpack_from(
            "<BIIBiiii", payload, 0)
        if version != 1:
            raise ValueError(f"unsupported tree version {version}")
        dx, off = PackedIntArray.from_buffer(payload, 26)
        dy, _ = PackedIntArray.from_buffer(payload, off)
        return cls(cap, leaves, data_count, width, Mbr(x1, x2, y1, y2), dx, dy), end


def build_mbr_tree(log: TrajectoryLog, leaf_capacity: int) -> MbrTree:
    if leaf_capacity < 1:
        raise ValueError("leaf capacity must be positive")
    n = log.data_count
    if n == 0:
        raise ValueError("cannot build a tree over an empty log")
    leaves_needed = (n + leaf_capacity - 1) // leaf_capacity
    leaf_count = 1 << (leaves_needed - 1).bit_length()
    node_count = 2 * leaf_count - 1
    pts = log.scan_positions(1, n)
    boxes: list[Mbr | None] = [None] * (node_count + 1)
    for j in range(leaf_count):
        lo = j * leaf_capacity
        if lo >= n:
            break
        chunk = pts[lo : lo + leaf_capacity]
        xs = [c[1] for c in chunk]
        ys = [c[2] for c in chunk]
        boxes[leaf_count + j] = Mbr(min(xs), max(xs), min(ys), max(ys))
    for p in range(leaf_count - 1, 0, -1):
        a, b = boxes[2 * p], boxes[2 * p + 1]
        boxes[p] = a if b is None else a.union(b)
    root = boxes[1]
    diffs_x: list[int] = []
    diffs_y: list[int] = []
    for p in range(2, node_count + 1):
        child = boxes[p]
        if child is None:
            diffs_x += [0, 0]
            diffs_y += [0, 0]
            continue
        parent = boxes[p >> 1]
        diffs_x += [child.xmin - parent.xmin, parent.xmax - child.xmax]
        diffs_y += [child.ymin - parent.ymin, parent.ymax - child.ymax]
    largest = max(diffs_x + diffs_y, default=0)
    width = max(1, largest.bit_length())
    return MbrTree(leaf_capacity, leaf_count, n, width, root,
                   PackedIntArray.from_values(diffs_x, width),
                   PackedIntArray.from_values(diffs_y, width))
