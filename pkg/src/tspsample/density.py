"""Discrete density grids on the unit hypercube.

A grid carries cell-averaged density values on a regular ``r x ... x r``
partition of ``[0, 1]^d``.  Values are densities (mass per unit volume), so a
normalized grid satisfies ``values.sum() * cell_volume == 1``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    AllZeroDensity,
    IndexOutOfRange,
    InvalidDecay,
    NegativeValue,
    NonFiniteValue,
    ResolutionMismatch,
)

_HEADER_MAGIC = "vds-density"


def _freeze(arr: np.ndarray) -> np.ndarray:
    out = np.ascontiguousarray(arr, dtype=np.float64)
    if out is arr:
        out = out.copy()
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class DensityGrid:
    """Cell-averaged density values on the unit hypercube.

    Attributes:
        dim: spatial dimension, at least 2.
        resolution: cells per axis, at least 2.
        values: read-only float array of shape ``(resolution,) * dim``.
        normalized: whether the values integrate to one over the cube.
    """

    dim: int
    resolution: int
    values: np.ndarray
    normalized: bool = False

    def __post_init__(self) -> None:
        if self.dim < 2:
            raise ValueError(f"dim must be >= 2, got {self.dim}")
        if self.resolution < 1:
            raise ValueError(f"resolution must be >= 1, got {self.resolution}")
        expected = (self.resolution,) * self.dim
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.shape != expected:
            if arr.size == self.resolution ** self.dim:
                arr = arr.reshape(expected)
            else:
                raise ValueError(
                    f"values has {arr.size} entries, expected {self.resolution ** self.dim}"
                )
        object.__setattr__(self, "values", _freeze(arr))

    @property
    def cell_volume(self) -> float:
        return float(self.resolution) ** (-self.dim)

    @property
    def total_mass(self) -> float:
        return float(self.values.sum()) * self.cell_volume


def _check_values(arr: np.ndarray) -> None:
    if not np.all(np.isfinite(arr)):
        raise NonFiniteValue("grid contains NaN or infinite values")
    if np.any(arr < 0):
        raise NegativeValue("grid contains negative values")


def normalize(grid: DensityGrid) -> DensityGrid:
    """Rescale so the values integrate to one over the hypercube.

    Raises:
        NonFiniteValue: if any value is NaN or infinite.
        NegativeValue: if any value is negative.
        AllZeroDensity: if the total mass is zero.
    """
    _check_values(grid.values)
    mass = grid.total_mass
    if mass == 0.0:
        raise AllZeroDensity("cannot normalize a grid with zero total mass")
    return DensityGrid(grid.dim, grid.resolution, grid.values / mass, normalized=True)


def uniform(dim: int, resolution: int) -> DensityGrid:
    """The normalized constant density on ``[0, 1]^dim``."""
    values = np.ones((resolution,) * dim)
    return DensityGrid(dim, resolution, values, normalized=True)


def from_values(dim: int, resolution: int, values) -> DensityGrid:
    """Build and normalize a grid from raw non-negative values."""
    raw = DensityGrid(dim, resolution, np.asarray(values, dtype=np.float64))
    return normalize(raw)


def _powered(grid: DensityGrid, exponent: float) -> DensityGrid:
    if not grid.normalized:
        raise ValueError("input grid must be normalized")
    return normalize(
        DensityGrid(grid.dim, grid.resolution, np.power(grid.values, exponent))
    )


def tsp_adjusted_density(grid: DensityGrid) -> DensityGrid:
    """Exponent-corrected density whose space-filling path traces the input.

    A path through points drawn from the returned density covers the cube
    with occupation proportional to the *input* density, which compensates
    for the dimension-dependent bias of path-based coverage.  The correction
    raises each value to ``d / (d - 1)`` and renormalizes.
    """
    d = grid.dim
    return _powered(grid, d / (d - 1.0))


def inverse_adjusted_density(grid: DensityGrid) -> DensityGrid:
    """Inverse of :func:`tsp_adjusted_density` (exponent ``(d - 1) / d``)."""
    d = grid.dim
    return _powered(grid, (d - 1.0) / d)


def radial_polynomial_density(
    dim: int, resolution: int, decay: float, plateau_radius: float
) -> DensityGrid:
    """Isotropic density with a flat centre and polynomial radial falloff.

    The value at a cell centre ``c`` is 1 when ``|c - centre|`` is at most
    ``rho0 = plateau_radius / 2`` and ``(rho0 / |c - centre|) ** decay``
    beyond, with the convention that the cell containing the hypercube
    centre always takes the plateau value 1.  The result is normalized.

    Raises:
        InvalidDecay: if ``decay`` is not positive.
    """
    if decay <= 0:
        raise InvalidDecay(f"decay must be positive, got {decay}")
    if not 0.0 <= plateau_radius < 1.0:
        raise ValueError(f"plateau_radius must lie in [0, 1), got {plateau_radius}")
    if resolution < 2:
        raise ValueError(f"resolution must be >= 2, got {resolution}")
    r = resolution
    axis = (np.arange(r) + 0.5) / r - 0.5
    grids = np.meshgrid(*([axis] * dim), indexing="ij")
    rho = np.sqrt(sum(g * g for g in grids))
    rho0 = plateau_radius / 2.0
    with np.errstate(divide="ignore"):
        values = np.where(rho <= rho0, 1.0, (rho0 / np.maximum(rho, 1e-300)) ** decay)
    values[(r // 2,) * dim] = 1.0
    return from_values(dim, r, values)


def cell_mass(grid: DensityGrid, cell_index: int) -> float:
    """Mass of one cell (row-major flat index): its value times the cell volume.

    Raises:
        IndexOutOfRange: if the index falls outside ``[0, resolution**dim)``.
    """
    idx = int(cell_index)
    if idx < 0 or idx >= grid.values.size:
        raise IndexOutOfRange(f"cell index {idx} outside [0, {grid.values.size})")
    return float(grid.values.ravel()[idx]) * grid.cell_volume


def coarsen(grid: DensityGrid, resolution: int) -> DensityGrid:
    """Block-average down to a coarser resolution that divides the current one.

    Cell masses are preserved, so a normalized grid stays normalized.

    Raises:
        ResolutionMismatch: if ``resolution`` does not divide the grid's.
    """
    r, m = grid.resolution, int(resolution)
    if m < 2 or r % m != 0:
        raise ResolutionMismatch(f"cannot coarsen resolution {r} to {m}")
    f = r // m
    shape = sum(((m, f) for _ in range(grid.dim)), ())
    axes = tuple(range(1, 2 * grid.dim, 2))
    values = grid.values.reshape(shape).mean(axis=axes)
    return DensityGrid(grid.dim, m, values, normalized=grid.normalized)


# --- text serialization ----------------------------------------------------

def write_density_payload(path, dim: int, resolution: int, values: np.ndarray,
                          kind: str | None = None) -> None:
    """Low-level writer for the grid text format (also used for empirical grids)."""
    tokens = [_HEADER_MAGIC, f"d={dim}", f"r={resolution}"]
    if kind is not None:
        tokens.append(f"kind={kind}")
    flat = np.asarray(values, dtype=np.float64).ravel()
    lines = [" ".join(tokens)]
    for row in flat.reshape(-1, resolution):
        lines.append(" ".join(repr(float(v)) for v in row))
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def read_density_payload(path):
    """Low-level reader; returns ``(dim, resolution, flat_values, kind)``."""
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().split()
        body = fh.read().split()
    if not header or header[0] != _HEADER_MAGIC:
        raise ValueError(f"{path}: not a density grid file")
    fields = dict(tok.split("=", 1) for tok in header[1:])
    dim = int(fields["d"])
    resolution = int(fields["r"])
    kind = fields.get("kind")
    values = np.array([float(tok) for tok in body], dtype=np.float64)
    if values.size != resolution ** dim:
        raise ValueError(
            f"{path}: expected {resolution ** dim} values, found {values.size}"
        )
    return dim, resolution, values, kind


def write_density(grid: DensityGrid, path) -> None:
    """Write a grid to the whitespace text format (row-major, last axis fastest)."""
    write_density_payload(path, grid.dim, grid.resolution, grid.values)


def read_density(path) -> DensityGrid:
    """Read a grid written by :func:`write_density`."""
    dim, resolution, values, kind = read_density_payload(path)
    if kind is not None:
        raise ValueError(f"{path}: unexpected kind={kind} for a density grid")
    grid = DensityGrid(dim, resolution, values)
    if abs(grid.total_mass - 1.0) < 1e-9:
        grid = DensityGrid(dim, resolution, values, normalized=True)
    return grid
