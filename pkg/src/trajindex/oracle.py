"""Uncompressed reference answers for cross-checking the index.

Everything here is a straight table scan over dense per-object arrays.
Deliberately no imports from the compressed structures: agreement between
the two routes is the whole point.
"""

from __future__ import annotations

import numpy as np


class PositionTable:
    """Dense (object x instant) coordinate arrays."""

    def __init__(self, ids, present, xs, ys):
        self._ids = ids          # sorted object ids, shape (O,)
        self._present = present  # bool, shape (O, T)
        self._xs = xs            # int64, shape (O, T)
        self._ys = ys
        self._row = {int(oid): i for i, oid in enumerate(ids)}

    @classmethod
    def from_samples(cls, samples, horizon: int | None = None) -> "PositionTable":
        rows = list(samples)
        if horizon is None:
            horizon = max(r[1] for r in rows) + 1 if rows else 0
        ids = np.unique(np.array([r[0] for r in rows], dtype=np.int64))
        index = {int(oid): i for i, oid in enumerate(ids)}
        present = np.zeros((len(ids), horizon), dtype=bool)
        xs = np.zeros((len(ids), horizon), dtype=np.int64)
        ys = np.zeros((len(ids), horizon), dtype=np.int64)
        for oid, t, x, y in rows:
            i = index[int(oid)]
            if present[i, t]:
                raise ValueError(f"duplicate sample for object {oid} at {t}")
            present[i, t] = True
            xs[i, t] = x
            ys[i, t] = y
        return cls(ids, present, xs, ys)

    @property
    def horizon(self) -> int:
        return self._present.shape[1]

    @property
    def object_ids(self) -> list[int]:
        return [int(i) for i in self._ids]

    def position(self, oid: int, t: int) -> tuple[int, int] | None:
        i = self._row[oid]
        if not self._present[i, t]:
            return None
        return int(self._xs[i, t]), int(self._ys[i, t])

    def trajectory(self, oid: int, first: int, last: int) -> list[tuple[int, int, int]]:
        i = self._row[oid]
        out = []
        for t in range(first, last + 1):
            if self._present[i, t]:
                out.append((t, int(self._xs[i, t]), int(self._ys[i, t])))
        return out


def oracle_slice(table: PositionTable, rect, q: int) -> list[tuple[int, int, int]]:
    """Objects inside rect = (x1, x2, y1, y2) at instant q, sorted by id."""
    x1, x2, y1, y2 = rect
    inside = (table._present[:, q]
              & (table._xs[:, q] >= x1) & (table._xs[:, q] <= x2)
              & (table._ys[:, q] >= y1) & (table._ys[:, q] <= y2))
    rows = np.flatnonzero(inside)
    return [(int(table._ids[i]), int(table._xs[i, q]), int(table._ys[i, q]))
            for i in rows]


def oracle_interval(table: PositionTable, rect, first: int, last: int) -> list[int]:
    """Ids of objects inside rect at any instant of first..last, sorted."""
    x1, x2, y1, y2 = rect
    window = slice(first, last + 1)
    inside = (table._present[:, window]
              & (table._xs[:, window] >= x1) & (table._xs[:, window] <= x2)
              & (table._ys[:, window] >= y1) & (table._ys[:, window] <= y2))
    rows = np.flatnonzero(inside.any(axis=1))
    return [int(table._ids[i]) for i in rows]


def oracle_mbr(points, first: int, last: int) -> tuple[int, int, int, int]:
    """Bounding box of points[first-1 .. last-1], points being (x, y) pairs."""
    chunk = points[first - 1 : last]
    xs = [p[0] for p in chunk]
    ys = [p[1] for p in chunk]
    return min(xs), max(xs), min(ys), max(ys)
