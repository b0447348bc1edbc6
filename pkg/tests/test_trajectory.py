import numpy as np
import pytest

from tspsample import density, sampler, trajectory, tsp
from tspsample.errors import DegeneratePath, InvalidStep, ResolutionMismatch

CORNERS = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])


def corner_trajectory():
    ps = sampler.PointSet(2, CORNERS)
    return trajectory.parameterize(ps, tsp.Tour(np.arange(4), 3.0, "exact"))


def random_trajectory(seed, n=60):
    g = density.radial_polynomial_density(2, 16, 1.5, 0.2)
    ps = sampler.draw_points(g, n, seed)
    return trajectory.parameterize(ps, tsp.solve_heuristic(ps))


def test_parameterize_square():
    traj = corner_trajectory()
    assert traj.total_length == 3.0
    assert np.array_equal(traj.cumulative_lengths, [0.0, 1.0, 2.0, 3.0])
    assert np.allclose(traj.evaluate(1 / 3), [1.0, 0.0])
    assert np.allclose(traj.at_arc_length(1.5), [1.0, 0.5])


def test_evaluate_accepts_arrays():
    traj = corner_trajectory()
    out = traj.evaluate(np.array([0.0, 0.5, 1.0]))
    assert out.shape == (3, 2)
    assert np.allclose(out[0], [0.0, 0.0])
    assert np.allclose(out[1], [1.0, 0.5])
    assert np.allclose(out[2], [0.0, 1.0])


def test_arc_length_is_clamped():
    traj = corner_trajectory()
    assert np.allclose(traj.at_arc_length(99.0), [0.0, 1.0])
    assert np.allclose(traj.at_arc_length(-5.0), [0.0, 0.0])


def test_parameterize_rejects_degenerate_paths():
    ps = sampler.PointSet(2, np.array([[0.5, 0.5], [0.5, 0.5]]))
    with pytest.raises(DegeneratePath):
        trajectory.parameterize(ps, tsp.Tour(np.arange(2), 0.0, "exact"))
    with pytest.raises(ValueError):
        trajectory.parameterize(
            sampler.PointSet(2, np.array([[0.1, 0.1]])), tsp.Tour(np.arange(1), 0.0, "exact")
        )


def test_resample_counts_and_positions():
    traj = corner_trajectory()
    ps = trajectory.resample(traj, 0.5)
    assert len(ps) == 7  # floor(3 / 0.5) + 1
    assert np.allclose(ps.points[3], [1.0, 0.5])
    assert np.allclose(ps.points[0], [0.0, 0.0])
    assert np.allclose(ps.points[-1], [0.0, 1.0])
    assert ps.seed is None


def test_resample_step_larger_than_curve():
    ps = trajectory.resample(corner_trajectory(), 10.0)
    assert len(ps) == 1
    assert np.allclose(ps.points[0], [0.0, 0.0])


def test_resample_rejects_bad_step():
    with pytest.raises(InvalidStep):
        trajectory.resample(corner_trajectory(), 0.0)
    with pytest.raises(InvalidStep):
        trajectory.resample(corner_trajectory(), -0.1)


def test_occupation_of_diagonal():
    ps = sampler.PointSet(2, np.array([[0.0, 0.0], [1.0, 1.0]]))
    traj = trajectory.parameterize(ps, tsp.Tour(np.arange(2), np.sqrt(2), "exact"))
    emp = trajectory.empirical_distribution(traj, 2)
    assert abs(emp.masses[0, 0] - 0.5) < 1e-12
    assert abs(emp.masses[1, 1] - 0.5) < 1e-12
    assert emp.masses[0, 1] == 0.0 and emp.masses[1, 0] == 0.0


def test_occupation_mass_sums_to_one():
    for seed in (3, 4, 5):
        emp = trajectory.empirical_distribution(random_trajectory(seed), 8)
        assert abs(emp.masses.sum() - 1.0) < 1e-9
        assert np.all(emp.masses >= 0.0)


def test_occupation_refinement_consistency():
    # computing on a fine grid and aggregating equals computing coarsely
    traj = random_trajectory(11)
    fine = trajectory.empirical_distribution(traj, 8).coarsen(4)
    coarse = trajectory.empirical_distribution(traj, 4)
    assert np.max(np.abs(fine.masses - coarse.masses)) < 1e-9


def test_coarsen_validation():
    emp = trajectory.empirical_distribution(random_trajectory(1), 8)
    with pytest.raises(ResolutionMismatch):
        emp.coarsen(3)


def test_dense_resampling_approaches_occupation():
    traj = random_trajectory(17)
    emp = trajectory.empirical_distribution(traj, 4)
    pts = trajectory.resample(traj, traj.total_length / 1e5)
    counted = trajectory.point_distribution(pts, 4)
    tv = 0.5 * np.abs(emp.masses - counted.masses).sum()
    assert tv < 0.01


def test_point_distribution_requires_points():
    with pytest.raises(DegeneratePath):
        trajectory.point_distribution(sampler.PointSet(2, np.zeros((0, 2))), 4)


def test_tv_distance_against_grid():
    emp = trajectory.EmpiricalDistribution(2, 2, np.full((2, 2), 0.25))
    assert trajectory.tv_distance(emp, density.uniform(2, 2)) == 0.0
    lopsided = trajectory.EmpiricalDistribution(2, 2, np.array([[1.0, 0.0], [0.0, 0.0]]))
    assert abs(trajectory.tv_distance(lopsided, density.uniform(2, 2)) - 0.75) < 1e-12


def test_tv_distance_validation():
    emp = trajectory.EmpiricalDistribution(2, 2, np.full((2, 2), 0.25))
    with pytest.raises(ResolutionMismatch):
        trajectory.tv_distance(emp, density.uniform(2, 4))
    with pytest.raises(ResolutionMismatch):
        trajectory.tv_distance(emp, density.uniform(3, 2))
    raw = density.DensityGrid(2, 2, np.ones(4))
    with pytest.raises(ValueError):
        trajectory.tv_distance(emp, raw)


def test_trajectory_csv_round_trip(tmp_path):
    traj = random_trajectory(23)
    path = tmp_path / "traj.csv"
    trajectory.write_trajectory(traj, path)
    back = trajectory.read_trajectory(path)
    assert np.array_equal(back.vertices, traj.vertices)
    assert abs(back.total_length - traj.total_length) < 1e-12
    assert back.dim == 2


def test_empirical_file_round_trip(tmp_path):
    emp = trajectory.empirical_distribution(random_trajectory(29), 4)
    path = tmp_path / "emp.txt"
    trajectory.write_empirical(emp, path)
    back = trajectory.read_empirical(path)
    assert back.dim == emp.dim and back.m == emp.m
    assert np.array_equal(back.masses, emp.masses)


def test_read_empirical_rejects_plain_density(tmp_path):
    g = density.uniform(2, 2)
    path = tmp_path / "grid.txt"
    density.write_density(g, path)
    with pytest.raises(ValueError):
        trajectory.read_empirical(path)
