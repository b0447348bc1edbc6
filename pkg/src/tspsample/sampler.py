"""Seeded point drawing from density grids.

Randomness is generated by the counter-based Philox engine keyed with a
64-bit seed, so runs are reproducible across platforms.  Drawing ``n``
points consumes exactly ``n * (dim + 1)`` uniforms laid out one row per
point, which makes the first ``k`` points of a draw independent of ``n``
(prefix property) -- useful when searching over point counts.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .density import DensityGrid


@dataclass(frozen=True)
class PointSet:
    """Points in ``[0, 1]^dim``, one row each, plus the seed that drew them."""

    dim: int
    points: np.ndarray
    seed: int | None = None

    def __post_init__(self) -> None:
        pts = np.ascontiguousarray(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != self.dim:
            raise ValueError(f"points must have shape (n, {self.dim})")
        if pts.size and (pts.min() < 0.0 or pts.max() > 1.0):
            raise ValueError("coordinates must lie in [0, 1]")
        pts = pts.copy() if pts is self.points else pts
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return self.points.shape[0]


def derive_seed(master: int, *path: int) -> int:
    """Derive a child 64-bit seed from a master seed and an index path.

    Uses the seed-sequence spawn mechanism, so distinct paths give
    statistically independent streams and the mapping is stable across
    runs and platforms.
    """
    ss = np.random.SeedSequence(entropy=int(master), spawn_key=tuple(int(p) for p in path))
    return int(ss.generate_state(1, np.uint64)[0])


def _generator(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=np.uint64(int(seed))))


def draw_points(grid: DensityGrid, n: int, seed: int) -> PointSet:
    """Draw ``n`` i.i.d. points from a normalized grid.

    Cells are chosen by inverting the cumulative cell-mass function and a
    uniform jitter places each point inside its cell, so zero-mass cells
    are never hit and the law converges to the grid density as the
    resolution grows.
    """
    if not grid.normalized:
        raise ValueError("draw_points requires a normalized grid")
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n}")
    d, r = grid.dim, grid.resolution
    if n == 0:
        return PointSet(d, np.empty((0, d)), seed=int(seed))
    u = _generator(seed).random(n * (d + 1)).reshape(n, d + 1)
    cum = np.cumsum(grid.values.ravel()) * grid.cell_volume
    cum[-1] = 1.0
    cells = np.searchsorted(cum, u[:, 0], side="right")
    coords = np.unravel_index(cells, grid.values.shape)
    base = np.stack(coords, axis=1).astype(np.float64)
    pts = (base + u[:, 1:]) / r
    return PointSet(d, pts, seed=int(seed))


def empirical_cell_histogram(ps: PointSet, resolution: int) -> np.ndarray:
    """Count points per cell of an ``resolution``-per-axis grid.

    Returns an int64 array of shape ``(resolution,) * dim``.  Points on the
    upper boundary are assigned to the last cell.
    """
    m = int(resolution)
    if m < 1:
        raise ValueError(f"resolution must be >= 1, got {m}")
    idx = np.minimum((ps.points * m).astype(np.int64), m - 1)
    idx = np.maximum(idx, 0)
    flat = np.ravel_multi_index(tuple(idx.T), (m,) * ps.dim)
    counts = np.bincount(flat, minlength=m ** ps.dim)
    return counts.reshape((m,) * ps.dim)


# --- CSV serialization -----------------------------------------------------

_AXES = ("x", "y", "z", "w")


def write_points(ps: PointSet, path) -> None:
    """Write points as CSV with a ``# seed=`` comment line and axis headers."""
    with open(path, "w", encoding="ascii", newline="") as fh:
        seed = "none" if ps.seed is None else str(int(ps.seed))
        fh.write(f"# seed={seed}\n")
        writer = csv.writer(fh)
        names = [_AXES[i] if i < len(_AXES) else f"x{i}" for i in range(ps.dim)]
        writer.writerow(names)
        for row in ps.points:
            writer.writerow([repr(float(v)) for v in row])


def read_points(path) -> PointSet:
    """Read a point CSV written by :func:`write_points`."""
    with open(path, "r", encoding="ascii", newline="") as fh:
        first = fh.readline().strip()
        if not first.startswith("# seed="):
            raise ValueError(f"{path}: missing seed comment line")
        token = first.split("=", 1)[1]
        seed = None if token == "none" else int(token)
        reader = csv.reader(fh)
        header = next(reader)
        dim = len(header)
        rows = [[float(v) for v in row] for row in reader if row]
    pts = np.array(rows, dtype=np.float64).reshape(len(rows), dim)
    return PointSet(dim, pts, seed=seed)
