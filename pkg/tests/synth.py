"""Synthetic fleets for tests: bounded-speed random walks on a grid."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class Fleet:
    ids: np.ndarray      # (O,)
    present: np.ndarray  # bool (O, T)
    xs: np.ndarray       # int64 (O, T)
    ys: np.ndarray       # int64 (O, T)
    extent: tuple[int, int]

    @property
    def horizon(self) -> int:
        return self.present.shape[1]

    @property
    def sample_count(self) -> int:
        return int(self.present.sum())

    def rows(self):
        """Yield (object id, instant, x, y) sorted by object then instant."""
        for i, oid in enumerate(self.ids):
            for t in np.flatnonzero(self.present[i]):
                yield int(oid), int(t), int(self.xs[i, t]), int(self.ys[i, t])

    def object_rows(self, oid: int):
        i = int(np.flatnonzero(self.ids == oid)[0])
        return [(int(t), int(self.xs[i, t]), int(self.ys[i, t]))
                for t in np.flatnonzero(self.present[i])]


def _fold(values: np.ndarray, extent: int) -> np.ndarray:
    # reflect off the grid walls; reflection never stretches a step, so a
    # speed bound on raw steps survives folding
    period = 2 * extent - 2
    v = np.mod(values, period)
    return np.where(v >= extent, period - v, v)


def make_fleet(num_objects: int, horizon: int, extent: tuple[int, int],
               seed: int, max_step: int = 3, drop_rate: float = 0.05,
               geometric: bool = False) -> Fleet:
    """Random-walk fleet; either uniform steps in [-max_step, max_step] or
    geometric step magnitudes with mean 2 cells and random sign."""
    rng = np.random.default_rng(seed)
    w, h = extent
    shape = (num_objects, horizon - 1)
    if geometric:
        sx = rng.geometric(0.5, size=shape) * rng.choice((-1, 1), size=shape)
        sy = rng.geometric(0.5, size=shape) * rng.choice((-1, 1), size=shape)
    else:
        sx = rng.integers(-max_step, max_step + 1, size=shape)
        sy = rng.integers(-max_step, max_step + 1, size=shape)
    x0 = rng.integers(0, w, size=(num_objects, 1))
    y0 = rng.integers(0, h, size=(num_objects, 1))
    xs = _fold(np.concatenate([x0, x0 + np.cumsum(sx, axis=1)], axis=1), w)
    ys = _fold(np.concatenate([y0, y0 + np.cumsum(sy, axis=1)], axis=1), h)
    present = rng.random((num_objects, horizon)) >= drop_rate
    # an object with no samples at all cannot be indexed; give it one back
    empty = np.flatnonzero(~present.any(axis=1))
    present[empty, 0] = True
    return Fleet(np.arange(1, num_objects + 1), present,
                 xs.astype(np.int64), ys.astype(np.int64), extent)
