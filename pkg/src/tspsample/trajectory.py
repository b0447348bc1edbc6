"""Constant-speed trajectories along point-set paths.

A trajectory is the piecewise-linear curve through the points in tour
order, parameterized by arc length.  Its occupation measure on a grid is
computed exactly by splitting each segment at cell boundaries.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .density import DensityGrid, read_density_payload, write_density_payload
from .errors import DegeneratePath, InvalidStep, ResolutionMismatch
from .sampler import PointSet
from .tsp import Tour, _check_order


@dataclass(frozen=True)
class Trajectory:
    """Constant-speed polyline through ``vertices`` (in visit order).

    ``cumulative_lengths[i]`` is the arc length from the start to vertex
    ``i``; the curve is parameterized on [0, 1] by arc-length fraction.
    """

    dim: int
    vertices: np.ndarray
    cumulative_lengths: np.ndarray
    total_length: float

    def __post_init__(self) -> None:
        for name in ("vertices", "cumulative_lengths"):
            arr = np.ascontiguousarray(getattr(self, name), dtype=np.float64)
            arr = arr.copy() if arr is getattr(self, name) else arr
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    def at_arc_length(self, arc) -> np.ndarray:
        """Position(s) at arc length ``arc`` (clamped to ``[0, total_length]``)."""
        arc = np.clip(np.asarray(arc, dtype=np.float64), 0.0, self.total_length)
        out = np.empty(arc.shape + (self.dim,), dtype=np.float64)
        for j in range(self.dim):
            out[..., j] = np.interp(arc, self.cumulative_lengths, self.vertices[:, j])
        return out

    def evaluate(self, s) -> np.ndarray:
        """Position(s) at arc-length fraction ``s`` in [0, 1] of the total."""
        s = np.asarray(s, dtype=np.float64)
        return self.at_arc_length(s * self.total_length)


def parameterize(ps: PointSet, tour: Tour) -> Trajectory:
    """Build the constant-speed polyline through the points in tour order.

    Raises:
        DegeneratePath: if the path has zero total length.
    """
    order = _check_order(ps, tour.order)
    if len(ps) < 2:
        raise ValueError("parameterize needs at least 2 points")
    vertices = ps.points[order]
    seg = np.sqrt((np.diff(vertices, axis=0) ** 2).sum(axis=1))
    arcs = np.concatenate([[0.0], np.cumsum(seg)])
    total = float(arcs[-1])
    if total == 0.0:
        raise DegeneratePath("all points coincide; the path has zero length")
    return Trajectory(ps.dim, vertices, arcs, total)


def resample(traj: Trajectory, delta_t: float) -> PointSet:
    """Sample the curve at arc lengths ``0, delta_t, 2*delta_t, ...``.

    Produces ``floor(total_length / delta_t) + 1`` points.

    Raises:
        InvalidStep: if ``delta_t`` is not positive.
    """
    if delta_t <= 0:
        raise InvalidStep(f"delta_t must be positive, got {delta_t}")
    count = int(np.floor(traj.total_length / delta_t)) + 1
    arcs = np.arange(count, dtype=np.float64) * delta_t
    pts = np.clip(traj.at_arc_length(arcs), 0.0, 1.0)
    return PointSet(traj.dim, pts, seed=None)


@dataclass(frozen=True)
class EmpiricalDistribution:
    """Mass per cell of an ``m``-per-axis grid, induced by a curve or points."""

    dim: int
    m: int
    masses: np.ndarray

    def __post_init__(self) -> None:
        arr = np.ascontiguousarray(self.masses, dtype=np.float64)
        expected = (self.m,) * self.dim
        if arr.shape != expected:
            if arr.size == self.m ** self.dim:
                arr = arr.reshape(expected)
            else:
                raise ValueError(f"masses must have {self.m ** self.dim} entries")
        arr = arr.copy() if arr is self.masses else arr
        arr.flags.writeable = False
        object.__setattr__(self, "masses", arr)

    def coarsen(self, m: int) -> "EmpiricalDistribution":
        """Sum blocks down to a coarser resolution that divides this one."""
        r, m = self.m, int(m)
        if m < 1 or r % m != 0:
            raise ResolutionMismatch(f"cannot aggregate resolution {r} to {m}")
        f = r // m
        shape = sum(((m, f) for _ in range(self.dim)), ())
        axes = tuple(range(1, 2 * self.dim, 2))
        return EmpiricalDistribution(self.dim, m, self.masses.reshape(shape).sum(axis=axes))


def _cell_of(point: np.ndarray, m: int) -> tuple:
    idx = np.minimum((point * m).astype(np.int64), m - 1)
    idx = np.maximum(idx, 0)
    return tuple(idx)


def empirical_distribution(traj: Trajectory, m: int) -> EmpiricalDistribution:
    """Fraction of arc length spent in each cell of an ``m``-per-axis grid.

    Each segment is split exactly at the grid planes it crosses; every
    sub-segment's length is credited to the cell containing its midpoint.
    Masses sum to one up to rounding.
    """
    m = int(m)
    if m < 1:
        raise ValueError(f"resolution must be >= 1, got {m}")
    d = traj.dim
    masses = np.zeros((m,) * d, dtype=np.float64)
    verts = traj.vertices
    for i in range(len(verts) - 1):
        p, q = verts[i], verts[i + 1]
        seg = q - p
        length = float(np.sqrt((seg * seg).sum()))
        if length == 0.0:
            continue
        cuts = [np.array([0.0, 1.0])]
        for j in range(d):
            if seg[j] == 0.0:
                continue
            lo, hi = min(p[j], q[j]), max(p[j], q[j])
            ks = np.arange(np.floor(lo * m) + 1, np.floor(hi * m) + 1)
            if len(ks):
                cuts.append((ks / m - p[j]) / seg[j])
        ts = np.sort(np.concatenate(cuts))
        ts = np.clip(ts, 0.0, 1.0)
        mids = p + 0.5 * (ts[:-1] + ts[1:])[:, None] * seg
        spans = (ts[1:] - ts[:-1]) * length
        for mid, span in zip(mids, spans):
            if span > 0.0:
                masses[_cell_of(mid, m)] += span
    return EmpiricalDistribution(d, m, masses / traj.total_length)


def point_distribution(ps: PointSet, m: int) -> EmpiricalDistribution:
    """Normalized per-cell point counts (the discrete analogue for point sets)."""
    from .sampler import empirical_cell_histogram

    counts = empirical_cell_histogram(ps, m)
    total = counts.sum()
    if total == 0:
        raise DegeneratePath("no points to histogram")
    return EmpiricalDistribution(ps.dim, int(m), counts / float(total))


def tv_distance(emp: EmpiricalDistribution, grid: DensityGrid) -> float:
    """Total-variation distance between cell masses and a normalized grid.

    Raises:
        ResolutionMismatch: if dimensions or resolutions differ.
    """
    if emp.dim != grid.dim or emp.m != grid.resolution:
        raise ResolutionMismatch(
            f"empirical {emp.dim}d/{emp.m} vs grid {grid.dim}d/{grid.resolution}"
        )
    if not grid.normalized:
        raise ValueError("tv_distance requires a normalized grid")
    ref = grid.values * grid.cell_volume
    return float(0.5 * np.abs(emp.masses - ref).sum())


# --- serialization ---------------------------------------------------------

def write_trajectory(traj: Trajectory, path) -> None:
    """Write vertices as CSV with a ``# total_length=`` comment line."""
    with open(path, "w", encoding="ascii", newline="") as fh:
        fh.write(f"# total_length={repr(float(traj.total_length))}\n")
        writer = csv.writer(fh)
        names = ["x", "y", "z", "w"][: traj.dim]
        writer.writerow(names)
        for row in traj.vertices:
            writer.writerow([repr(float(v)) for v in row])


def read_trajectory(path) -> Trajectory:
    """Read a trajectory CSV written by :func:`write_trajectory`."""
    with open(path, "r", encoding="ascii", newline="") as fh:
        first = fh.readline().strip()
        if not first.startswith("# total_length="):
            raise ValueError(f"{path}: missing total_length comment line")
        reader = csv.reader(fh)
        header = next(reader)
        rows = [[float(v) for v in row] for row in reader if row]
    verts = np.array(rows, dtype=np.float64)
    seg = np.sqrt((np.diff(verts, axis=0) ** 2).sum(axis=1))
    arcs = np.concatenate([[0.0], np.cumsum(seg)])
    return Trajectory(len(header), verts, arcs, float(arcs[-1]))


def write_empirical(emp: EmpiricalDistribution, path) -> None:
    """Write cell masses in the grid text format tagged ``kind=empirical``."""
    write_density_payload(path, emp.dim, emp.m, emp.masses, kind="empirical")


def read_empirical(path) -> EmpiricalDistribution:
    """Read masses written by :func:`write_empirical`."""
    dim, resolution, values, kind = read_density_payload(path)
    if kind != "empirical":
        raise ValueError(f"{path}: not an empirical distribution file")
    return EmpiricalDistribution(dim, resolution, values)
