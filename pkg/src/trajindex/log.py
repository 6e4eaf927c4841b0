"""Per-period movement logs with constant-time position extraction.

A log covers one object inside one period of length d starting at instant
k.  Local instants run 1..d-1 (instant k itself belongs to the snapshot
layer).  The log stores the window [first, last] that actually has data, a
bitmap marking instants inside the window with no sample, and per axis a
sign bitmap plus two unary streams holding the magnitudes of non-negative
and negative steps.  The first step is the absolute coordinate, so a
prefix-sum difference of the two streams reconstructs any position.
"""

from __future__ import annotations

import struct

import numpy as np

from trajindex.succinct import (
    BitVector,
    SparseBitVector,
    UnaryDeltaStream,
    read_frame,
    write_frame,
)

# below this fraction of missing instants the gap bitmap goes to the
# compressed representation
_SPARSE_GAP_DENSITY = 0.10


class TimeIndex:
    """Data-presence window of one track: [first, last] plus a gap bitmap.

    Offsets into the window are 1-based; a set bit means the instant has no
    sample.  Dense windows keep the bitmap plain, gappy-but-mostly-full
    windows switch to the compressed form.
    """

    def __init__(self, first: int, last: int, gaps):
        if first < 1 or last < first:
            raise ValueError("bad window bounds")
        self.first = first
        self.last = last
        length = last - first + 1
        self._sparse = len(gaps) < _SPARSE_GAP_DENSITY * length
        if self._sparse:
            self._gapmap = SparseBitVector.from_positions(length, gaps)
        else:
            self._gapmap = BitVector.from_set_positions(length, gaps)

    def __len__(self) -> int:
        return self.last - self.first + 1

    @property
    def gap_count(self) -> int:
        return self._gapmap.count_ones

    @property
    def data_count(self) -> int:
        return len(self) - self.gap_count

    def is_gap(self, offset: int) -> bool:
        return bool(self._gapmap.access(offset))

    def gaps_upto(self, offset: int) -> int:
        return self._gapmap.rank1(offset)

    def data_offset(self, ordinal: int) -> int:
        """Window offset of the ordinal-th instant that has data."""
        return self._gapmap.select0(ordinal)

    def data_offsets(self, start_ordinal: int = 1):
        return self._gapmap.zeros(start_ordinal)

    def code_bits(self) -> int:
        return self._gapmap.code_bits()

    def to_bytes(self) -> bytes:
        payload = struct.pack("<BIIB", 1, self.first, self.last, int(self._sparse))
        payload += self._gapmap.to_bytes()
        return write_frame(payload)

    @classmethod
    def from_buffer(cls, buf, offset: int = 0) -> tuple["TimeIndex", int]:
        payload, end = read_frame(buf, offset)
        version, first, last, sparse = struct.unpack_from("<BIIB", payload, 0)
        if version != 1:
            raise ValueError(f"unsupported time index version {version}")
        kind = SparseBitVector if sparse else BitVector
        gapmap, _ = kind.from_buffer(payload, 10)
        obj = cls.__new__(cls)
        obj.first = first
        obj.last = last
        obj._sparse = bool(sparse)
        obj._gapmap = gapmap
        return obj, end


class AxisDeltas:
    """One coordinate axis: step signs plus unary magnitude streams."""

    def __init__(self, sign: BitVector, pos: UnaryDeltaStream, neg: UnaryDeltaStream):
        self.sign = sign
        self.pos = pos
        self.neg = neg

    @classmethod
    def from_deltas(cls, deltas: np.ndarray) -> "AxisDeltas":
        nonneg = deltas >= 0
        return cls(
            BitVector.from_bits(nonneg),
            UnaryDeltaStream.from_values(deltas[nonneg]),
            UnaryDeltaStream.from_values(-deltas[~nonneg]),
        )

    def value(self, ordinal: int) -> int:
        """Coordinate after the ordinal-th step."""
        p = self.sign.rank1(ordinal)
        return self.pos.prefix_sum(p) - self.neg.prefix_sum(ordinal - p)

    def code_bits(self) -> int:
        return self.sign.code_bits() + self.pos.code_bits() + self.neg.code_bits()

    def to_bytes(self) -> bytes:
        return self.sign.to_bytes() + self.pos.to_bytes() + self.neg.to_bytes()

    @classmethod
    def from_buffer(cls, buf, offset: int) -> tuple["AxisDeltas", int]:
        sign, offset = BitVector.from_buffer(buf, offset)
        pos, offset = UnaryDeltaStream.from_buffer(buf, offset)
        neg, offset = UnaryDeltaStream.from_buffer(buf, offset)
        return cls(sign, pos, neg), offset


class TrajectoryLog:
    """Movement of one object within one period, positions in O(1)."""

    def __init__(self, object_id: int, start: int, period: int,
                 time: TimeIndex, dx: AxisDeltas, dy: AxisDeltas):
        self.object_id = object_id
        self.start = start
        self.period = period
        self.time = time
        self.dx = dx
        self.dy = dy

    @property
    def data_count(self) -> int:
        return self.time.data_count

    def position(self, i: int) -> tuple[int, int] | None:
        """Coordinates at local instant i in 1..period-1, or None."""
        if not 1 <= i <= self.period - 1:
            raise IndexError(f"local instant {i} out of range 1..{self.period - 1}")
        t = self.time
        if i < t.first or i > t.last:
            return None
        off = i - t.first + 1
        gaps = t.gaps_upto(off)
        if t.is_gap(off):
            return None
        ordinal = off - gaps
        return self.dx.value(ordinal), self.dy.value(ordinal)

    def count_data_upto(self, i: int) -> int:
        """Number of data instants at local instants 1..i (i may be 0)."""
        if not 0 <= i <= self.period - 1:
            raise IndexError(f"local instant {i} out of range 0..{self.period - 1}")
        t = self.time
        if i < t.first:
            return 0
        off = min(i, t.last) - t.first + 1
        return off - t.gaps_upto(off)

    def map_instant(self, i: int) -> int:
        """Data ordinals at or before local instant i."""
        if not 1 <= i <= self.period - 1:
            raise IndexError(f"local instant {i} out of range 1..{self.period - 1}")
        return self.count_data_upto(i)

    def unmap_ordinal(self, j: int) -> int:
        """Local instant of the j-th data sample."""
        n = self.data_count
        if not 1 <= j <= n:
            raise IndexError(f"ordinal {j} out of range 1..{n}")
        return self.time.data_offset(j) + self.time.first - 1

    def iter_positions(self, frm: int, to: int):
        """Yield (local instant, x, y) for data ordinals frm..to.

        Sequential cursors over the gap bitmap and the four magnitude
        streams keep the whole walk linear in to - frm.
        """
        n = self.data_count
        if not 1 <= frm <= to <= n:
            raise IndexError(f"ordinal range {frm}..{to} out of range 1..{n}")
        sx, sy = self.dx.sign, self.dy.sign
        px = sx.rank1(frm - 1)
        py = sy.rank1(frm - 1)
        x_pos = self.dx.pos.prefix_sum(px)
        x_neg = self.dx.neg.prefix_sum(frm - 1 - px)
        y_pos = self.dy.pos.prefix_sum(py)
        y_neg = self.dy.neg.prefix_sum(frm - 1 - py)
        it_xp = self.dx.pos.prefix_iter(px)
        it_xn = self.dx.neg.prefix_iter(frm - 1 - px)
        it_yp = self.dy.pos.prefix_iter(py)
        it_yn = self.dy.neg.prefix_iter(frm - 1 - py)
        offsets = self.time.data_offsets(frm)
        base = self.time.first - 1
        for j in range(frm, to + 1):
            off = next(offsets)
            if sx.access(j):
                x_pos = next(it_xp)
            else:
                x_neg = next(it_xn)
            if sy.access(j):
                y_pos = next(it_yp)
            else:
                y_neg = next(it_yn)
            yield base + off, x_pos - x_neg, y_pos - y_neg

    def scan_positions(self, frm: int, to: int) -> list[tuple[int, int, int]]:
        return list(self.iter_positions(frm, to))

    def code_bits(self) -> int:
        return self.time.code_bits() + self.dx.code_bits() + self.dy.code_bits()

    def to_bytes(self) -> bytes:
        payload = struct.pack("<BII", 1, self.object_id, self.start)
        payload += self.time.to_bytes()
        payload += self.dx.to_bytes()
        payload += self.dy.to_bytes()
        return write_frame(payload)

    @classmethod
    def from_buffer(cls, buf, offset: int, period: int) -> tuple["TrajectoryLog", int]:
        payload, end = read_frame(buf, offset)
        version, object_id, start = struct.unpack_from("<BII", payload, 0)
        if version != 1:
            raise ValueError(f"unsupported log version {version}")
        time, off = TimeIndex.from_buffer(payload, 9)
        dx, off = AxisDeltas.from_buffer(payload, off)
        dy, _ = AxisDeltas.from_buffer(payload, off)
        return cls(object_id, start, period, time, dx, dy), end


def build_log(samples, start: int, period: int, object_id: int = 0) -> TrajectoryLog:
    """Build a log from (instant, x, y) rows sorted by instant.

    Instants are global and must fall in start+1 .. start+period-1; the
    instant at start itself is snapshot territory.
    """
    rows = list(samples)
    if not rows:
        raise ValueError("a log needs at least one sample")
    ts = np.array([r[0] for r in rows], dtype=np.int64)
    xs = np.array([r[1] for r in rows], dtype=np.int64)
    ys = np.array([r[2] for r in rows], dtype=np.int64)
    if np.any(np.diff(ts) <= 0):
        raise ValueError("instants must be strictly increasing")
    if ts[0] < start + 1 or ts[-1] > start + period - 1:
        raise ValueError(
            f"instants must lie in {start + 1}..{start + period - 1}")
    local = ts - start
    first, last = int(local[0]), int(local[-1])
    present = np.zeros(last - first + 1, dtype=bool)
    present[local - first] = True
    gaps = np.flatnonzero(~present) + 1
    time = TimeIndex(first, last, gaps)
    dx = AxisDeltas.from_deltas(np.diff(xs, prepend=0))
    dy = AxisDeltas.from_deltas(np.diff(ys, prepend=0))
    return TrajectoryLog(object_id, start, period, time, dx, dy)
