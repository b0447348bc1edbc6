import json

import numpy as np
import pytest

from tspsample import calibration, density, experiment, sampler, trajectory, tsp
from tspsample.cli import main

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_no_command_prints_help(capsys):
    code, out, _ = run(capsys)
    assert code == 2
    assert "usage:" in out


def test_density_command_writes_grid_and_figure(tmp_path, capsys):
    out = tmp_path / "g.txt"
    fig = tmp_path / "g.png"
    code, _, err = run(
        capsys, "density", "--density", "radial:2.0:0.1", "--resolution", "16",
        "--out", str(out), "--figure", str(fig),
    )
    assert code == 0 and err == ""
    grid = density.read_density(out)
    assert grid.resolution == 16 and grid.normalized
    assert fig.read_bytes().startswith(PNG_MAGIC)


def test_stage_chain(tmp_path, capsys):
    pts = tmp_path / "p.csv"
    tour = tmp_path / "t.csv"
    traj = tmp_path / "tr.csv"
    samples = tmp_path / "s.csv"
    emp = tmp_path / "e.txt"
    assert run(capsys, "sample", "--density", "uniform", "--n", "10",
               "--seed", "3", "--out", str(pts))[0] == 0
    assert run(capsys, "tsp", "--points", str(pts), "--out", str(tour))[0] == 0
    assert run(capsys, "trajectory", "--points", str(pts), "--tour", str(tour),
               "--delta-t", "0.01", "--out", str(traj),
               "--samples-out", str(samples),
               "--empirical-out", str(emp), "--empirical-resolution", "4")[0] == 0

    ps = sampler.read_points(pts)
    assert len(ps) == 10 and ps.seed == sampler.derive_seed(3, 0)
    t = tsp.read_tour(tour)
    assert t.method == "exact"  # auto picks the exact solver for 10 points
    resampled = sampler.read_points(samples)
    assert len(resampled) == int(np.floor(t.length / 0.01)) + 1
    e = trajectory.read_empirical(emp)
    assert abs(e.masses.sum() - 1.0) < 1e-9


def test_choose_n_prints_json(capsys):
    code, out, err = run(
        capsys, "choose-n", "--density", "uniform", "--target-samples", "10000",
        "--delta-t", "0.001", "--beta", "0.7708",
    )
    assert code == 0 and err == ""
    n = json.loads(out)["n"]
    assert n == calibration.choose_n(10000, 0.001, density.uniform(2, 64), 0.7708)


def test_calibrate_then_choose_n(tmp_path, capsys):
    est_path = tmp_path / "beta.json"
    code, _, _ = run(capsys, "calibrate", "--trials", "2", "--n-per-trial", "200",
                     "--seed", "1", "--out", str(est_path))
    assert code == 0
    est = calibration.read_estimate(est_path)
    assert est.trials == 2 and est.n_per_trial == 200 and est.dim == 2

    code, out, _ = run(capsys, "choose-n", "--density", "uniform",
                       "--target-samples", "500", "--delta-t", "0.01",
                       "--calibration", str(est_path))
    assert code == 0
    code2, out2, _ = run(capsys, "choose-n", "--density", "uniform",
                         "--target-samples", "500", "--delta-t", "0.01",
                         "--beta", repr(est.beta))
    assert code2 == 0 and json.loads(out)["n"] == json.loads(out2)["n"]


def test_usage_error_envelope(tmp_path, capsys):
    code, _, err = run(capsys, "sample", "--density", str(tmp_path / "missing.txt"),
                       "--n", "5", "--out", str(tmp_path / "p.csv"))
    assert code == 2
    payload = json.loads(err)
    assert payload["error"] == "UsageError"
    assert payload["stage"] == "sample"
    assert "missing.txt" in payload["message"]


def test_runtime_error_envelope(tmp_path, capsys):
    code, _, err = run(capsys, "choose-n", "--density", "uniform",
                       "--target-samples", "0", "--delta-t", "0.01")
    assert code == 3
    assert json.loads(err)["error"] == "UnreachableTarget"

    pts = tmp_path / "p.csv"
    run(capsys, "sample", "--density", "uniform", "--n", "13", "--out", str(pts))
    code, _, err = run(capsys, "tsp", "--points", str(pts), "--method", "exact",
                       "--out", str(tmp_path / "t.csv"))
    assert code == 3
    assert json.loads(err)["error"] == "TooManyPointsForExact"


PIPELINE_ARGS = (
    "pipeline", "--density", "radial:1.5:0.1", "--resolution", "16",
    "--target-samples", "2000", "--delta-t", "0.001", "--seed", "5", "--m", "4",
)


def test_pipeline_outputs_and_determinism(tmp_path, capsys):
    dirs = [tmp_path / "a", tmp_path / "b"]
    for d in dirs:
        assert run(capsys, *PIPELINE_ARGS, "--out-dir", str(d))[0] == 0
    names = ["density.txt", "points.csv", "tour.csv", "trajectory.csv",
             "samples.csv", "empirical.txt", "summary.json"]
    for name in names:
        a, b = (d / name for d in dirs)
        assert a.exists(), name
        assert a.read_bytes() == b.read_bytes(), name
    summary = json.loads((dirs[0] / "summary.json").read_text())
    assert set(summary) == {"N", "T", "N_s", "tv"}
    assert summary["N_s"] == len(sampler.read_points(dirs[0] / "samples.csv"))


def test_pipeline_config_file_and_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"seed": 5, "target_samples": 2000,
                               "density": "radial:1.5:0.1", "resolution": 16}))
    out = tmp_path / "run"
    # --seed on the command line beats the config file value
    code, _, _ = run(capsys, "pipeline", "--config", str(cfg), "--seed", "7",
                     "--out-dir", str(out))
    assert code == 0
    assert sampler.read_points(out / "points.csv").seed == sampler.derive_seed(7, 0)


def test_pipeline_rejects_unknown_config_keys(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"tagret_samples": 100}))
    code, _, err = run(capsys, "pipeline", "--config", str(cfg),
                       "--out-dir", str(tmp_path / "x"))
    assert code == 2
    assert "tagret_samples" in json.loads(err)["message"]


def test_experiment_full_mask_saturates_snr(tmp_path, capsys):
    out = tmp_path / "exp"
    code, _, _ = run(capsys, "experiment", "--side", "8", "--acceleration", "1.0",
                     "--schemes", "iid-target", "--seeds", "0",
                     "--out-dir", str(out))
    assert code == 0
    rows = experiment.read_report(out / "report.csv")
    assert len(rows) == 1
    assert rows[0].snr_db == 300.0  # a complete mask reproduces the phantom
    assert rows[0].sampled_count == 64


def test_experiment_rejects_unknown_scheme(tmp_path, capsys):
    code, _, err = run(capsys, "experiment", "--schemes", "bogus",
                       "--out-dir", str(tmp_path / "x"))
    assert code == 2
    assert "bogus" in json.loads(err)["message"]
