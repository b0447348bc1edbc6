"""Command-line interface: one binary, one subcommand per stage.

All randomness flows from ``--seed``: the k-th independent draw of a
command uses ``derive_seed(seed, k)`` (see :mod:`tspsample.sampler`).
Failures print a one-line JSON object to stderr; argument or
configuration problems exit with code 2, runtime failures with code 3.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from . import calibration, density, experiment, plots, recon, sampler, trajectory, tsp
from .errors import TspSampleError


class UsageError(Exception):
    """Bad arguments or configuration detected before any computation."""


def _emit_error(stage: str, exc: Exception, code: int) -> int:
    payload = {"error": type(exc).__name__, "stage": stage, "message": str(exc)}
    print(json.dumps(payload, sort_keys=True), file=sys.stderr)
    return code


def _load_density(spec: str, dim: int, resolution: int) -> density.DensityGrid:
    """Resolve a density argument: 'uniform', 'radial:DECAY:PLATEAU', or a path."""
    try:
        if spec == "uniform":
            return density.uniform(dim, resolution)
        if spec.startswith("radial:"):
            parts = spec.split(":")
            if len(parts) != 3:
                raise UsageError(f"radial spec must be radial:DECAY:PLATEAU, got {spec!r}")
            return density.radial_polynomial_density(
                dim, resolution, float(parts[1]), float(parts[2])
            )
        if not os.path.exists(spec):
            raise UsageError(f"density file not found: {spec}")
        grid = density.read_density(spec)
        return grid if grid.normalized else density.normalize(grid)
    except UsageError:
        raise
    except (TspSampleError, ValueError) as exc:
        raise UsageError(str(exc)) from exc


def _resolve_beta(args) -> float:
    if getattr(args, "calibration", None):
        try:
            est = calibration.read_estimate(args.calibration)
        except (OSError, ValueError, KeyError) as exc:
            raise UsageError(f"cannot read calibration file: {exc}") from exc
        return est.beta
    if getattr(args, "beta", None) is not None:
        return args.beta
    return calibration.DEFAULT_BETA_2D


def _write_json(payload: dict, path_or_none) -> None:
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if path_or_none is None:
        sys.stdout.write(text)
    else:
        with open(path_or_none, "w", encoding="ascii") as fh:
            fh.write(text)


# --- handlers ---------------------------------------------------------------

def _cmd_density(args) -> int:
    grid = _load_density(args.density, args.dim, args.resolution)
    density.write_density(grid, args.out)
    if args.figure:
        plots.save_density_figure(grid, args.figure)
    return 0


def _cmd_sample(args) -> int:
    grid = _load_density(args.density, args.dim, args.resolution)
    if args.adjust:
        grid = density.tsp_adjusted_density(grid)
    ps = sampler.draw_points(grid, args.n, sampler.derive_seed(args.seed, 0))
    sampler.write_points(ps, args.out)
    if args.figure:
        plots.save_points_figure(ps, args.figure)
    return 0


def _cmd_tsp(args) -> int:
    ps = sampler.read_points(args.points)
    method = args.method
    if method == "auto":
        method = "exact" if len(ps) <= tsp.EXACT_LIMIT else "heuristic"
    if method == "exact":
        tour = tsp.solve_exact(ps)
    else:
        cfg = tsp.HeuristicConfig(
            neighbor_list_size=args.neighbors, two_opt_max_passes=args.passes
        )
        tour = tsp.solve_heuristic(ps, cfg)
    tsp.write_tour(tour, args.out)
    if args.figure:
        traj = trajectory.parameterize(ps, tour)
        plots.save_trajectory_figure(traj, args.figure)
    return 0


def _cmd_trajectory(args) -> int:
    ps = sampler.read_points(args.points)
    tour = tsp.read_tour(args.tour)
    traj = trajectory.parameterize(ps, tour)
    trajectory.write_trajectory(traj, args.out)
    if args.samples_out:
        samples = trajectory.resample(traj, args.delta_t)
        sampler.write_points(samples, args.samples_out)
    if args.empirical_out:
        emp = trajectory.empirical_distribution(traj, args.empirical_resolution)
        trajectory.write_empirical(emp, args.empirical_out)
    if args.figure:
        plots.save_trajectory_figure(traj, args.figure)
    return 0


def _cmd_calibrate(args) -> int:
    est = calibration.estimate_beta(args.dim, args.n_per_trial, args.trials, args.seed)
    calibration.write_estimate(est, args.out)
    return 0


def _cmd_choose_n(args) -> int:
    grid = _load_density(args.density, args.dim, args.resolution)
    if args.adjust:
        grid = density.tsp_adjusted_density(grid)
    beta = _resolve_beta(args)
    n = calibration.choose_n(args.target_samples, args.delta_t, grid, beta)
    _write_json({"n": n}, None)
    return 0


def _merge_config(args, keys) -> dict:
    """Fill argparse ``None`` values from --config JSON, then hard defaults."""
    merged = {}
    file_cfg = {}
    if getattr(args, "config", None):
        try:
            with open(args.config, "r", encoding="ascii") as fh:
                file_cfg = json.load(fh)
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read config file: {exc}") from exc
        unknown = set(file_cfg) - set(keys)
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
    for key, default in keys.items():
        value = getattr(args, key, None)
        if value is None:
            value = file_cfg.get(key, default)
        merged[key] = value
    return merged


def _cmd_pipeline(args) -> int:
    cfg = _merge_config(
        args,
        {
            "density": "radial:2.0:0.05",
            "dim": 2,
            "resolution": 64,
            "target_samples": 10000,
            "delta_t": 1e-3,
            "seed": 0,
            "m": 4,
            "beta": None,
            "adjust": True,
            "neighbor_list_size": 16,
            "two_opt_max_passes": 30,
        },
    )
    if getattr(args, "no_adjust", False):
        cfg["adjust"] = False
    grid = _load_density(cfg["density"], int(cfg["dim"]), int(cfg["resolution"]))
    if getattr(args, "calibration", None):
        beta = _resolve_beta(args)
    elif cfg["beta"] is not None:
        beta = float(cfg["beta"])
    else:
        beta = calibration.DEFAULT_BETA_2D
    out = args.out_dir
    os.makedirs(out, exist_ok=True)
    result = experiment.run_pipeline(
        grid,
        int(cfg["target_samples"]),
        float(cfg["delta_t"]),
        int(cfg["seed"]),
        beta=float(beta),
        adjust=bool(cfg["adjust"]),
        m=int(cfg["m"]),
        tsp_config=tsp.HeuristicConfig(
            neighbor_list_size=int(cfg["neighbor_list_size"]),
            two_opt_max_passes=int(cfg["two_opt_max_passes"]),
        ),
    )
    density.write_density(grid, os.path.join(out, "density.txt"))
    sampler.write_points(result["points"], os.path.join(out, "points.csv"))
    tsp.write_tour(result["tour"], os.path.join(out, "tour.csv"))
    trajectory.write_trajectory(result["trajectory"], os.path.join(out, "trajectory.csv"))
    sampler.write_points(result["samples"], os.path.join(out, "samples.csv"))
    trajectory.write_empirical(result["empirical"], os.path.join(out, "empirical.txt"))
    _write_json(result["summary"], os.path.join(out, "summary.json"))
    if args.figures:
        plots.save_density_figure(grid, os.path.join(out, "density.png"))
        plots.save_points_figure(result["points"], os.path.join(out, "points.png"))
        plots.save_trajectory_figure(result["trajectory"], os.path.join(out, "trajectory.png"))
    return 0


def _cmd_experiment(args) -> int:
    cfg = _merge_config(
        args,
        {
            "side": 128,
            "acceleration": 5.0,
            "decay": 1.5,
            "plateau_radius": 0.1,
            "schemes": ",".join(experiment.SCHEMES),
            "seeds": "0,1,2,3,4",
            "delta_t": None,
            "beta": calibration.DEFAULT_BETA_2D,
        },
    )
    schemes = tuple(s.strip() for s in str(cfg["schemes"]).split(",") if s.strip())
    try:
        seeds = tuple(int(s) for s in str(cfg["seeds"]).split(",") if s.strip())
    except ValueError as exc:
        raise UsageError(f"bad seeds list: {exc}") from exc
    unknown = [s for s in schemes if s not in experiment.SCHEMES]
    if unknown:
        raise UsageError(f"unknown schemes {unknown}; choose from {experiment.SCHEMES}")
    exp_cfg = experiment.ExperimentConfig(
        side=int(cfg["side"]),
        acceleration=float(cfg["acceleration"]),
        decay=float(cfg["decay"]),
        plateau_radius=float(cfg["plateau_radius"]),
        schemes=schemes,
        seeds=seeds,
        delta_t=None if cfg["delta_t"] is None else float(cfg["delta_t"]),
        beta=float(cfg["beta"]),
    )
    out = args.out_dir
    os.makedirs(out, exist_ok=True)
    rows, artifacts = experiment.run_experiment(exp_cfg)
    experiment.write_report(rows, os.path.join(out, "report.csv"))
    if args.figures:
        plots.save_snr_figure(rows, os.path.join(out, "snr.png"))
        for scheme in exp_cfg.schemes:
            first = min(seed for (s, seed) in artifacts if s == scheme)
            art = artifacts[(scheme, first)]
            plots.save_mask_figure(art["mask"], os.path.join(out, f"mask-{scheme}.png"))
            plots.save_image_figure(art["image"], os.path.join(out, f"recon-{scheme}.png"))
            recon.write_mask(art["mask"], os.path.join(out, f"mask-{scheme}.pbm"))
            recon.write_pgm(art["image"], os.path.join(out, f"recon-{scheme}.pgm"))
            recon.write_raw(art["image"], os.path.join(out, f"recon-{scheme}.f64"))
    return 0


# --- parser -----------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tspsample",
        description="Variable-density sampling along travelling-salesman paths",
    )
    sub = parser.add_subparsers(dest="command")

    def add_density_args(p, default="radial:2.0:0.05"):
        p.add_argument("--density", default=default,
                       help="'uniform', 'radial:DECAY:PLATEAU', or a density file")
        p.add_argument("--dim", type=int, default=2)
        p.add_argument("--resolution", type=int, default=64)

    p = sub.add_parser("density", help="generate a density grid file")
    add_density_args(p)
    p.add_argument("--out", required=True)
    p.add_argument("--figure")
    p.set_defaults(handler=_cmd_density)

    p = sub.add_parser("sample", help="draw seeded points from a density")
    add_density_args(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--adjust", action="store_true",
                   help="draw from the exponent-corrected density")
    p.add_argument("--out", required=True)
    p.add_argument("--figure")
    p.set_defaults(handler=_cmd_sample)

    p = sub.add_parser("tsp", help="link points with a short open path")
    p.add_argument("--points", required=True)
    p.add_argument("--method", choices=("exact", "heuristic", "auto"), default="auto")
    p.add_argument("--neighbors", type=int, default=16)
    p.add_argument("--passes", type=int, default=30)
    p.add_argument("--out", required=True)
    p.add_argument("--figure")
    p.set_defaults(handler=_cmd_tsp)

    p = sub.add_parser("trajectory", help="parameterize a tour and resample it")
    p.add_argument("--points", required=True)
    p.add_argument("--tour", required=True)
    p.add_argument("--delta-t", type=float, default=1e-3)
    p.add_argument("--out", required=True)
    p.add_argument("--samples-out")
    p.add_argument("--empirical-out")
    p.add_argument("--empirical-resolution", type=int, default=64)
    p.add_argument("--figure")
    p.set_defaults(handler=_cmd_trajectory)

    p = sub.add_parser("calibrate", help="estimate the path-length constant")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--n-per-trial", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(handler=_cmd_calibrate)

    p = sub.add_parser("choose-n", help="invert the length law for a sample budget")
    add_density_args(p)
    p.add_argument("--target-samples", type=int, required=True)
    p.add_argument("--delta-t", type=float, required=True)
    p.add_argument("--adjust", action="store_true")
    p.add_argument("--beta", type=float)
    p.add_argument("--calibration", help="calibration JSON file (overrides --beta)")
    p.set_defaults(handler=_cmd_choose_n)

    p = sub.add_parser("pipeline", help="density -> points -> path -> samples")
    p.add_argument("--density")
    p.add_argument("--dim", type=int)
    p.add_argument("--resolution", type=int)
    p.add_argument("--target-samples", type=int)
    p.add_argument("--delta-t", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--m", type=int, help="partition resolution for the TV summary")
    p.add_argument("--beta", type=float)
    p.add_argument("--calibration")
    p.add_argument("--no-adjust", action="store_true")
    p.add_argument("--neighbor-list-size", type=int, dest="neighbor_list_size")
    p.add_argument("--two-opt-max-passes", type=int, dest="two_opt_max_passes")
    p.add_argument("--config", help="JSON file with defaults for the flags above")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--figures", action="store_true")
    p.set_defaults(handler=_cmd_pipeline)

    p = sub.add_parser("experiment", help="compare sampling schemes by SNR")
    p.add_argument("--side", type=int)
    p.add_argument("--acceleration", type=float)
    p.add_argument("--decay", type=float)
    p.add_argument("--plateau-radius", type=float, dest="plateau_radius")
    p.add_argument("--schemes")
    p.add_argument("--seeds")
    p.add_argument("--delta-t", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--config", help="JSON file with defaults for the flags above")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--figures", action="store_true")
    p.set_defaults(handler=_cmd_experiment)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if not hasattr(args, "handler"):
        parser.print_help()
        return 2
    stage = args.command or "tspsample"
    try:
        return args.handler(args)
    except UsageError as exc:
        return _emit_error(stage, exc, 2)
    except TspSampleError as exc:
        return _emit_error(stage, exc, 3)
    except (ValueError, OSError) as exc:
        return _emit_error(stage, exc, 3)


if __name__ == "__main__":
    sys.exit(main())
