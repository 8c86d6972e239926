"""Command-line front end.

    sdrbeam run-curve CONFIG --sweep {snapshots,snr} [--runs N] --out PATH [--seed S] [--avg {db,linear}]
    sdrbeam estimate-sv CONFIG [--dump-certificates]
    sdrbeam pattern CONFIG --method NAME [--grid STEP] --out PATH

Exit codes: 0 success, 2 configuration error, 3 too many solver failures
(or a solver failure in a single-shot command), 4 infeasible or
boundary-feasible sector model. ``SDRBEAM_WORKERS`` sets the number of
Monte-Carlo worker processes (default: all available cores).
"""

import argparse
import os
import sys

import numpy as np

from .array_model import beampattern, power_db
from .beamform import METHODS, build_weights, sir_infinite
from .config import ConfigError, load_config
from .errors import BoundaryFeasibleError, DomainError, InfeasibleError
from .evaluation import SOLVER_FAILURES, Sweep, run_monte_carlo
from .linalg import eigh_sorted, phase_distance
from .sector import Feasibility, SectorModel, constraint_term
from .sim import (STREAM_MISMATCH, STREAM_SNAPSHOTS, draw_actual_steering, generate_snapshots,
                  make_rng, sample_covariance)
from .svest import estimate_steering

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_INFEASIBLE = 0, 2, 3, 4
WORKERS_ENV = "SDRBEAM_WORKERS"
PATTERN_PSEUDO = "constraint-term"
BOUNDARY_DIRECTIVE = ("sector model is boundary feasible (Delta0 = M lambda_min(C~)): the dual search "
                      "does not apply; enumerate the minimal eigenspace of C~ instead")


def _workers():
    raw = os.environ.get(WORKERS_ENV)
    if raw is None:
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"{WORKERS_ENV} must be a positive integer, got {raw!r}")
    if n < 1:
        raise ConfigError(f"{WORKERS_ENV} must be a positive integer, got {raw!r}")
    return n


def _sector_model(cfg, scenario):
    return SectorModel.build(scenario.geometry, scenario.sector, cfg.num_basis, cfg.quadrature_step,
                             cfg.delta0)


def _require_feasible(model):
    status = model.feasibility()
    if status is Feasibility.BOUNDARY:
        raise BoundaryFeasibleError(BOUNDARY_DIRECTIVE)
    if status is Feasibility.INFEASIBLE:
        raise InfeasibleError("sector model is infeasible: Delta0 / M is below lambda_min(C~)")


def _realization(cfg, scenario, run=0):
    """Actual steering vector and sample covariance of one run."""
    a = draw_actual_steering(scenario, make_rng(scenario.seed, run, STREAM_MISMATCH))
    X = generate_snapshots(scenario, a, make_rng(scenario.seed, run, STREAM_SNAPSHOTS))
    return a, sample_covariance(X, cfg.diagonal_loading)


def _fmt(x):
    return "%.6f" % x


def write_curve_csv(curve, path):
    """Write a :class:`SinrCurve` as `x,method,mean_sinr_db,stderr_db,failures`."""
    names = ["optimal"] + list(curve.methods)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("x,method,mean_sinr_db,stderr_db,failures\n")
        for p in curve.points:
            for m in names:
                fh.write(f"{_fmt(p.x)},{m},{_fmt(p.mean_sinr_db[m])},{_fmt(p.stderr_db[m])},{p.failures[m]}\n")


def cmd_run_curve(args):
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg.seed = args.seed
    runs = cfg.runs if args.runs is None else args.runs
    if runs < 1:
        raise ConfigError("must be >= 1", "--runs")
    scenario = cfg.scenario()
    if args.sweep == "snapshots":
        sweep = Sweep(scenario, "snapshots", cfg.snapshot_grid)
    else:
        sweep = Sweep(scenario, "snr_db", cfg.snr_grid)
    if "proposed" in cfg.methods:
        _require_feasible(_sector_model(cfg, scenario))
    curve = run_monte_carlo(sweep, cfg.methods, runs, cfg.settings(), cfg.num_basis, cfg.quadrature_step,
                            averaging=args.avg, workers=_workers(), loading=cfg.diagonal_loading,
                            delta0=cfg.delta0)
    write_curve_csv(curve, args.out)
    bad = curve.invalid_methods
    if bad:
        print(f"error: more than 5% solver failures for {', '.join(bad)}; partial results in {args.out}",
              file=sys.stderr)
        return EXIT_SOLVER
    print(f"wrote {args.out} ({len(curve.points)} points, {runs} runs, digest {curve.digest})")
    return EXIT_OK


def cmd_estimate_sv(args):
    cfg = load_config(args.config)
    scenario = cfg.scenario()
    model = _sector_model(cfg, scenario)
    _require_feasible(model)
    _, r_hat = _realization(cfg, scenario)
    M = scenario.geometry.M
    est = estimate_steering(r_hat.inverse, model.c_tilde, model.delta0, M, tol=cfg.solver_tol,
                            null_tol=cfg.null_tol)
    d, k = est.dual, est.kkt_residuals
    out = [f"steering-vector estimate: M={M} K={scenario.num_snapshots} seed={scenario.seed}",
           "element magnitude phase_deg"]
    for m, v in enumerate(est.a_hat):
        out.append(f"{m} {_fmt(abs(v))} {_fmt(np.degrees(np.angle(v)))}")
    out += [
        f"gamma1 = {d.gamma1:.12e}",
        f"gamma2 = {d.gamma2:.12e}",
        f"null_dim = {d.null_dim}",
        f"case = {est.case}",
        f"objective = {est.objective:.12e}",
        f"dual_value = {d.dual_value:.12e}",
        f"duality_gap = {est.duality_gap:.3e}",
        f"kkt.stationarity = {k.stationarity:.3e}",
        f"kkt.norm_gap = {k.norm_gap:.3e}",
        f"kkt.slackness = {k.slackness:.3e}",
        f"kkt.constraint_margin = {k.constraint_margin:.3e}",
    ]
    if est.constraint_inactive:
        ref = sir_infinite(r_hat).steering
        out.append("constraint inactive (gamma2 = 0): the estimate is the principal eigenvector of R^, "
                   f"i.e. the SIR -> infinity solution (phase distance {phase_distance(est.a_hat, ref):.3e})")
    if args.dump_certificates:
        lam = eigh_sorted(r_hat.inverse - d.gamma1 * np.eye(M) + d.gamma2 * model.c_tilde)[0]
        out.append(f"delta0 = {model.delta0:.12e}")
        out.append(f"lambda_min(C~) = {eigh_sorted(model.c_tilde)[0][0]:.12e}")
        out.append(f"dual_iterations = {d.iterations}")
        out.append("certificate eigenvalues (Ri - gamma1 I + gamma2 C~):")
        out.extend(f"  {v:.6e}" for v in lam)
    print("\n".join(out))
    return EXIT_OK


def cmd_pattern(args):
    cfg = load_config(args.config)
    if args.method not in METHODS and args.method != PATTERN_PSEUDO:
        raise ConfigError(f"unknown method {args.method!r}; choose from {', '.join(METHODS + (PATTERN_PSEUDO,))}",
                          "--method")
    if not args.grid > 0:
        raise ConfigError("grid step must be positive", "--grid")
    scenario = cfg.scenario()
    geom = scenario.geometry
    n = int(np.floor(180.0 / args.grid + 1e-9))
    grid = -90.0 + args.grid * np.arange(n + 1)
    model = _sector_model(cfg, scenario)
    if args.method == PATTERN_PSEUDO:
        # each angle on its own so values do not depend on the grid
        values = power_db(np.array([constraint_term(geom, model.c_tilde, t)[0] for t in grid]))
        rows = zip(grid.tolist(), values.tolist())
    else:
        if args.method == "proposed":
            _require_feasible(model)
        _, r_hat = _realization(cfg, scenario)
        bw = build_weights(args.method, r_hat, scenario.presumed_steering, model, cfg.settings(),
                           len(scenario.interferers))
        rows = beampattern(geom, bw.w, grid)
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("angle_deg,value_db\n")
        for t, v in rows:
            fh.write(f"{_fmt(t)},{_fmt(v)}\n")
    print(f"wrote {args.out} ({len(grid)} angles)")
    return EXIT_OK


def build_parser():
    ap = argparse.ArgumentParser(prog="sdrbeam", description="Robust beamforming by globally optimal "
                                 "steering-vector estimation.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run-curve", help="Monte-Carlo SINR curve to CSV")
    p.add_argument("config")
    p.add_argument("--sweep", choices=("snapshots", "snr"), required=True)
    p.add_argument("--runs", type=int, default=None, help="overrides the config value")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=None, help="overrides the config value")
    p.add_argument("--avg", choices=("db", "linear"), default="db")
    p.set_defaults(func=cmd_run_curve)

    p = sub.add_parser("estimate-sv", help="single-shot estimate with optimality certificates")
    p.add_argument("config")
    p.add_argument("--dump-certificates", action="store_true")
    p.set_defaults(func=cmd_estimate_sv)

    p = sub.add_parser("pattern", help="beampattern or constraint-term curve to CSV")
    p.add_argument("config")
    p.add_argument("--method", required=True)
    p.add_argument("--grid", type=float, default=0.5)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_pattern)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, DomainError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except SOLVER_FAILURES as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
