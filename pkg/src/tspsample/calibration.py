"""Length law for shortest paths through random points, and its inversion.

For ``N`` i.i.d. points from a density ``p`` on the unit cube, the shortest
path length grows like ``beta * N**((d-1)/d) * integral(p**((d-1)/d))``.
The constant ``beta`` is estimated empirically with the same heuristic
solver used in production, so solver overhead cancels when the law is
inverted to pick a point count for a sample budget.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .density import DensityGrid, uniform
from .errors import UnreachableTarget
from .sampler import derive_seed, draw_points
from .tsp import HeuristicConfig, solve_heuristic

#: Fallback constant for dimension 2, used when no explicit estimate is
#: supplied.  Value from ``estimate_beta(2, trials=20, n_per_trial=20000,
#: seed=0)`` with the packaged heuristic solver (0.7708 +/- 0.0004); it is
#: the solver's realized growth rate, not a universal constant, so recompute
#: it after any solver change.
DEFAULT_BETA_2D = 0.7708


@dataclass(frozen=True)
class BetaEstimate:
    """Empirical growth constant with its standard error and provenance."""

    dim: int
    beta: float
    std_error: float
    trials: int
    n_per_trial: int
    seed: int


def estimate_beta(
    dim: int,
    n_per_trial: int,
    trials: int,
    seed: int,
    config: HeuristicConfig | None = None,
) -> BetaEstimate:
    """Estimate the growth constant from uniform draws on the unit cube.

    Each trial draws ``n_per_trial`` uniform points with an independent
    derived seed, solves heuristically, and rescales the length by
    ``n**((d-1)/d)``; for the uniform density the integral factor is one.

    Requires ``trials >= 2`` and ``n_per_trial >= 100``.
    """
    if trials < 2:
        raise ValueError(f"trials must be >= 2, got {trials}")
    if n_per_trial < 100:
        raise ValueError(f"n_per_trial must be >= 100, got {n_per_trial}")
    grid = uniform(dim, 2)
    scale = float(n_per_trial) ** ((dim - 1) / dim)
    samples = np.empty(trials)
    for t in range(trials):
        ps = draw_points(grid, n_per_trial, derive_seed(seed, t))
        samples[t] = solve_heuristic(ps, config).length / scale
    beta = float(samples.mean())
    std_error = float(samples.std(ddof=1) / math.sqrt(trials))
    return BetaEstimate(dim, beta, std_error, trials, n_per_trial, int(seed))


def density_length_factor(grid: DensityGrid) -> float:
    """The integral ``sum(v**((d-1)/d)) * cell_volume`` of a normalized grid."""
    if not grid.normalized:
        raise ValueError("length factor requires a normalized grid")
    d = grid.dim
    return float(np.power(grid.values, (d - 1.0) / d).sum() * grid.cell_volume)


def expected_length(n: int, grid: DensityGrid, beta: float) -> float:
    """Model path length for ``n`` points drawn from ``grid``.

    This is the asymptotic growth law evaluated at ``n``; it is applied from
    ``n == 1`` even though a one-point path trivially has zero length, so the
    model stays strictly increasing and invertible.
    """
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n}")
    if beta <= 0:
        raise ValueError(f"beta must be positive, got {beta}")
    if n == 0:
        return 0.0
    d = grid.dim
    return beta * float(n) ** ((d - 1.0) / d) * density_length_factor(grid)


def choose_n(target_samples: int, delta_t: float, grid: DensityGrid, beta: float) -> int:
    """Smallest point count whose model trajectory yields the sample budget.

    Resampling a curve of length ``L`` at step ``delta_t`` produces
    ``floor(L / delta_t) + 1`` samples.  The closed-form inversion
    ``N = ceil((target * delta_t / (beta * I)) ** (d/(d-1)))`` is refined
    by a +-1 scan so the returned ``N`` is the exact minimizer; note the
    sample count is monotone in ``N``.

    Raises:
        UnreachableTarget: if ``target_samples < 1``.
    """
    if target_samples < 1:
        raise UnreachableTarget(f"cannot target fewer than 1 sample, got {target_samples}")
    if delta_t <= 0:
        raise ValueError(f"delta_t must be positive, got {delta_t}")
    d = grid.dim
    factor = beta * density_length_factor(grid)

    def count(n: int) -> int:
        return int(math.floor(expected_length(n, grid, beta) / delta_t)) + 1

    guess = (target_samples * delta_t / factor) ** (d / (d - 1.0))
    n = max(1, int(math.ceil(guess)))
    while n > 1 and count(n - 1) >= target_samples:
        n -= 1
    while count(n) < target_samples:
        n += 1
    return n


# --- serialization ---------------------------------------------------------

def write_estimate(est: BetaEstimate, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        json.dump(
            {
                "dim": est.dim,
                "beta": est.beta,
                "std_error": est.std_error,
                "trials": est.trials,
                "n_per_trial": est.n_per_trial,
                "seed": est.seed,
            },
            fh,
            indent=2,
            sort_keys=True,
        )
        fh.write("\n")


def read_estimate(path) -> BetaEstimate:
    with open(path, "r", encoding="ascii") as fh:
        data = json.load(fh)
    return BetaEstimate(
        dim=int(data["dim"]),
        beta=float(data["beta"]),
        std_error=float(data["std_error"]),
        trials=int(data["trials"]),
        n_per_trial=int(data["n_per_trial"]),
        seed=int(data["seed"]),
    )
