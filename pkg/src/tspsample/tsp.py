"""Open travelling-salesman paths through point sets.

Two solvers share one interface: an exact subset-DP solver for small
instances and a nearest-neighbour + neighbourhood-restricted 2-opt
heuristic that scales to hundreds of thousands of points.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from . import _tsp_kernels as _k
from .errors import InvalidPermutation, TooManyPointsForExact
from .sampler import PointSet

EXACT_LIMIT = 12


@dataclass(frozen=True)
class Tour:
    """A visiting order over a point set, its length, and which solver made it."""

    order: np.ndarray
    length: float
    method: str

    def __post_init__(self) -> None:
        arr = np.ascontiguousarray(self.order, dtype=np.int64)
        arr = arr.copy() if arr is self.order else arr
        arr.flags.writeable = False
        object.__setattr__(self, "order", arr)


@dataclass(frozen=True)
class HeuristicConfig:
    """Knobs for the heuristic solver.

    ``neighbor_list_size`` bounds the candidate moves per point,
    ``two_opt_max_passes`` the number of improvement sweeps.  ``seed`` is
    accepted for interface stability but the current solver is
    deterministic and does not consume it.
    """

    neighbor_list_size: int = 16
    two_opt_max_passes: int = 30
    seed: int = 0


def _check_order(ps: PointSet, order: np.ndarray) -> np.ndarray:
    arr = np.asarray(order, dtype=np.int64)
    n = len(ps)
    if arr.shape != (n,) or not np.array_equal(np.sort(arr), np.arange(n)):
        raise InvalidPermutation(f"order is not a permutation of 0..{n - 1}")
    return arr


def path_length(ps: PointSet, order) -> float:
    """Total Euclidean length of the open path visiting ``order``.

    Raises:
        InvalidPermutation: if ``order`` is not a permutation of the points.
    """
    arr = _check_order(ps, order)
    if len(ps) < 2:
        return 0.0
    diffs = np.diff(ps.points[arr], axis=0)
    return float(np.sqrt((diffs * diffs).sum(axis=1)).sum())


def _trivial_tour(ps: PointSet, method: str) -> Tour:
    n = len(ps)
    return Tour(np.arange(n, dtype=np.int64), 0.0, method)


def solve_exact(ps: PointSet) -> Tour:
    """Provably shortest open path via dynamic programming over subsets.

    Limited to ``EXACT_LIMIT`` points.  Among equally short paths the
    lexicographically smallest order is returned, so the first index is
    always below the last and results are unique.

    Raises:
        TooManyPointsForExact: above the instance-size limit.
    """
    n = len(ps)
    if n > EXACT_LIMIT:
        raise TooManyPointsForExact(f"exact solver limited to {EXACT_LIMIT} points, got {n}")
    if n < 2:
        return _trivial_tour(ps, "exact")
    pts = ps.points
    diff = pts[:, None, :] - pts[None, :, :]
    dist = np.sqrt((diff * diff).sum(axis=2))
    dp = _k.held_karp(dist)
    full = (1 << n) - 1
    opt = float(dp[full].min())
    tol = 1e-9
    # dist is symmetric, so dp[mask, j] is also the best path over mask
    # *starting* at j; greedily extending with the smallest feasible index
    # yields the lexicographically smallest optimal order.
    cur = int(min(j for j in range(n) if dp[full, j] <= opt + tol))
    order = [cur]
    mask, budget = full, opt
    while mask != (1 << cur):
        rest = mask & ~(1 << cur)
        nxt = -1
        for t in range(n):
            if (rest >> t) & 1 and dist[cur, t] + dp[rest, t] <= budget + tol:
                nxt = t
                break
        if nxt < 0:  # pragma: no cover - defensive
            raise RuntimeError("path reconstruction failed")
        budget -= dist[cur, nxt]
        mask, cur = rest, nxt
        order.append(cur)
    arr = np.array(order, dtype=np.int64)
    return Tour(arr, path_length(ps, arr), "exact")


def solve_heuristic(ps: PointSet, config: HeuristicConfig | None = None) -> Tour:
    """Nearest-neighbour construction plus 2-opt restricted to near candidates.

    The construction starts from the point closest to the centroid (ties to
    the smallest index).  Improvement sweeps run until no move applies or
    ``max_passes`` is reached; the length never increases between sweeps.
    """
    cfg = config or HeuristicConfig()
    if cfg.neighbor_list_size < 1 or cfg.two_opt_max_passes < 0:
        raise ValueError("neighbor_list_size must be >= 1 and two_opt_max_passes >= 0")
    n = len(ps)
    if n < 2:
        return _trivial_tour(ps, "heuristic")
    pts = np.ascontiguousarray(ps.points, dtype=np.float64)
    d = ps.dim
    g = max(1, int(round((n / 2.0) ** (1.0 / d))))
    order, start = _k.build_cells(pts, g)
    centroid = pts.mean(axis=0)
    first = int(np.argmin(((pts - centroid) ** 2).sum(axis=1)))
    tour = _k.nn_path(pts, g, order, start, first)
    k = min(cfg.neighbor_list_size, n - 1)
    nb = _k.knn(pts, g, order, start, k)
    pos = np.empty(n, dtype=np.int64)
    pos[tour] = np.arange(n, dtype=np.int64)
    eps = 1e-12
    prev = _k.path_length(pts, tour)
    for _ in range(cfg.two_opt_max_passes):
        moves = _k.two_opt_pass(pts, tour, pos, nb, eps)
        cur = _k.path_length(pts, tour)
        if cur > prev + 1e-9 * max(1.0, prev):  # pragma: no cover - invariant
            raise AssertionError("improvement sweep increased path length")
        prev = cur
        if moves == 0:
            break
    return Tour(tour, float(prev), "heuristic")


# --- CSV serialization -----------------------------------------------------

def write_tour(tour: Tour, path) -> None:
    """Write a tour as CSV with a ``# length=... method=...`` comment line."""
    with open(path, "w", encoding="ascii", newline="") as fh:
        fh.write(f"# length={repr(float(tour.length))} method={tour.method}\n")
        writer = csv.writer(fh)
        writer.writerow(["index"])
        for i in tour.order:
            writer.writerow([int(i)])


def read_tour(path) -> Tour:
    """Read a tour CSV written by :func:`write_tour`."""
    with open(path, "r", encoding="ascii", newline="") as fh:
        first = fh.readline().strip()
        if not first.startswith("# length="):
            raise ValueError(f"{path}: missing tour comment line")
        fields = dict(tok.split("=", 1) for tok in first[2:].split())
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["index"]:
            raise ValueError(f"{path}: unexpected header {header}")
        order = [int(row[0]) for row in reader if row]
    return Tour(np.array(order, dtype=np.int64), float(fields["length"]), fields["method"])
