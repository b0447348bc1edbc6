import itertools

import numpy as np
import pytest

from tspsample import density, sampler, tsp
from tspsample.errors import InvalidPermutation, TooManyPointsForExact

CORNERS = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])


def brute_force_open_path(points: np.ndarray):
    """Reference solver: enumerate all orders with first index < last index."""
    n = len(points)
    perms = np.array(list(itertools.permutations(range(n))), dtype=np.int64)
    perms = perms[perms[:, 0] < perms[:, -1]]
    diff = points[:, None, :] - points[None, :, :]
    dist = np.sqrt((diff * diff).sum(axis=2))
    lengths = dist[perms[:, :-1], perms[:, 1:]].sum(axis=1)
    best = lengths.min()
    # permutations() yields lexicographic order, so the first hit is canonical
    idx = int(np.nonzero(lengths <= best + 1e-12)[0][0])
    return perms[idx], float(best)


def test_path_length_square():
    ps = sampler.PointSet(2, CORNERS)
    assert tsp.path_length(ps, [0, 1, 2, 3]) == 3.0
    assert tsp.path_length(ps, [3, 2, 1, 0]) == 3.0
    assert abs(tsp.path_length(ps, [0, 2, 1, 3]) - (2 * np.sqrt(2) + 1)) < 1e-12


def test_path_length_rejects_non_permutations():
    ps = sampler.PointSet(2, CORNERS)
    for bad in ([0, 1, 2], [0, 1, 2, 2], [0, 1, 2, 4]):
        with pytest.raises(InvalidPermutation):
            tsp.path_length(ps, bad)


def test_path_length_trivial_sizes():
    assert tsp.path_length(sampler.PointSet(2, np.zeros((0, 2))), []) == 0.0
    assert tsp.path_length(sampler.PointSet(2, np.array([[0.5, 0.5]])), [0]) == 0.0


def test_exact_square_is_canonical():
    tour = tsp.solve_exact(sampler.PointSet(2, CORNERS))
    assert tour.method == "exact"
    assert tour.length == 3.0
    # several orders reach length 3; the lexicographically smallest wins
    assert np.array_equal(tour.order, [0, 1, 2, 3])


def test_exact_collinear():
    ps = sampler.PointSet(2, np.array([[0.5, 0.5], [0.1, 0.5], [0.9, 0.5]]))
    tour = tsp.solve_exact(ps)
    assert abs(tour.length - 0.8) < 1e-15
    assert np.array_equal(tour.order, [1, 0, 2])


def test_exact_matches_brute_force():
    rng_ns = [5, 6, 7, 8]
    for i, n in enumerate(rng_ns * 3):
        pts = np.random.default_rng(500 + i).random((n, 2))
        tour = tsp.solve_exact(sampler.PointSet(2, pts))
        order, best = brute_force_open_path(pts)
        assert abs(tour.length - best) < 1e-12
        assert np.array_equal(tour.order, order)


def test_exact_size_limit():
    ps = sampler.PointSet(2, np.random.default_rng(0).random((13, 2)))
    with pytest.raises(TooManyPointsForExact):
        tsp.solve_exact(ps)
    # the limit itself is fine
    big = tsp.solve_exact(sampler.PointSet(2, np.random.default_rng(0).random((12, 2))))
    assert len(big.order) == 12 == tsp.EXACT_LIMIT


def test_exact_trivial_sizes():
    for n in (0, 1):
        tour = tsp.solve_exact(sampler.PointSet(2, np.random.default_rng(1).random((n, 2))))
        assert tour.length == 0.0 and len(tour.order) == n


def test_heuristic_never_beats_exact():
    for s in range(30):
        pts = np.random.default_rng(9000 + s).random((10, 2))
        ps = sampler.PointSet(2, pts)
        h = tsp.solve_heuristic(ps)
        e = tsp.solve_exact(ps)
        assert h.length >= e.length - 1e-9
        assert h.method == "heuristic"
        # reported length matches an independent recompute of the order
        assert abs(tsp.path_length(ps, h.order) - h.length) < 1e-9


def test_heuristic_tiny_instances():
    for n in (0, 1, 2, 3):
        pts = np.random.default_rng(n).random((n, 2))
        ps = sampler.PointSet(2, pts)
        tour = tsp.solve_heuristic(ps)
        assert sorted(tour.order.tolist()) == list(range(n))
        if n >= 2:
            assert abs(tsp.path_length(ps, tour.order) - tour.length) < 1e-12


def test_heuristic_deterministic():
    ps = sampler.PointSet(2, np.random.default_rng(4).random((200, 2)))
    a = tsp.solve_heuristic(ps)
    b = tsp.solve_heuristic(ps)
    assert np.array_equal(a.order, b.order) and a.length == b.length


def test_heuristic_scale_covariance():
    pts = np.random.default_rng(12).random((150, 2))
    base = tsp.solve_heuristic(sampler.PointSet(2, pts))
    for s in (0.5, 0.25):
        scaled = tsp.solve_heuristic(sampler.PointSet(2, pts * s))
        assert np.array_equal(scaled.order, base.order)
        assert scaled.length == s * base.length  # powers of two scale exactly


def test_heuristic_zero_passes_is_construction_only():
    ps = sampler.PointSet(2, np.random.default_rng(21).random((300, 2)))
    nn_only = tsp.solve_heuristic(ps, tsp.HeuristicConfig(two_opt_max_passes=0))
    improved = tsp.solve_heuristic(ps)
    assert nn_only.length >= improved.length - 1e-12


def test_heuristic_config_validation():
    ps = sampler.PointSet(2, np.random.default_rng(2).random((5, 2)))
    with pytest.raises(ValueError):
        tsp.solve_heuristic(ps, tsp.HeuristicConfig(neighbor_list_size=0))
    with pytest.raises(ValueError):
        tsp.solve_heuristic(ps, tsp.HeuristicConfig(two_opt_max_passes=-1))


def test_tour_csv_round_trip(tmp_path):
    ps = sampler.PointSet(2, np.random.default_rng(8).random((40, 2)))
    tour = tsp.solve_heuristic(ps)
    path = tmp_path / "tour.csv"
    tsp.write_tour(tour, path)
    back = tsp.read_tour(path)
    assert np.array_equal(back.order, tour.order)
    assert back.length == tour.length
    assert back.method == "heuristic"


def test_read_tour_rejects_bad_files(tmp_path):
    path = tmp_path / "tour.csv"
    path.write_text("index\n0\n1\n")
    with pytest.raises(ValueError):
        tsp.read_tour(path)


def test_heuristic_length_scaling_is_stable():
    # realized growth rate at 1e5 and 4e5 points should agree closely;
    # this is the slowest unit test (roughly half a minute)
    g = density.uniform(2, 2)
    rates = []
    for n, seed in ((100_000, 0), (400_000, 0)):
        ps = sampler.draw_points(g, n, sampler.derive_seed(seed, 0))
        rates.append(tsp.solve_heuristic(ps).length / np.sqrt(n))
    assert abs(rates[0] - rates[1]) / rates[1] < 0.10
