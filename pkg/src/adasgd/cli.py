"""Command-line front end.

    adasgd run CONFIG.json [--seed N] [--output-dir DIR] [--jobs J]
    adasgd bounds --beta 1 --sigma0 1 --eta 1 --gamma 1 --T 1000 --delta 0.1 [--subgaussian]

Exit status: 0 all assertions pass, 1 an assertion failed, 2 usage/parse/validation error.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from pathlib import Path

import numpy as np
from pydantic import ValidationError

from . import bounds
from .config import ExperimentConfig
from .errors import ConfigurationError, InvalidInput, UnsupportedQuery
from .optimizer import AdaSgdConfig, KnownParamConfig, known_stepsize, run
from .rng import RngStream
from .verify import (
    check_trajectory,
    concentration_trial,
    coverage_experiment,
    lemma_matrix,
    lower_bound_experiment,
    rate_fit_experiment,
)
from .verify.common import analysis_noise

OUTPUT_ROOT_ENV = "ADASGD_OUTPUT_ROOT"
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _clean(obj):
    """JSON-ready copy: numpy scalars/arrays to Python, NaN/inf to None."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def write_json(path: Path, data) -> None:
    path.write_text(json.dumps(_clean(data), indent=2, sort_keys=True, allow_nan=False) + "\n")


def write_table(path: Path, columns: dict) -> None:
    names = list(columns)
    n = len(next(iter(columns.values()))) if columns else 0
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(names)
        for i in range(n):
            w.writerow([_cell(columns[k][i]) for k in names])


def _cell(v):
    if isinstance(v, (float, np.floating)):
        return "" if math.isnan(v) else repr(float(v))
    return str(v.item() if hasattr(v, "item") else v)


def load_config(path: str) -> ExperimentConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}:{exc.lineno}:{exc.colno}: JSON parse error: {exc.msg}") from exc
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as exc:
        lines = []
        for err in exc.errors():
            loc = ".".join(str(p) for p in err["loc"]) or "<root>"
            lines.append(f"{loc}: {err['msg']}")
        raise UsageError(f"{path}: invalid config\n  " + "\n  ".join(lines)) from exc


def output_dir(cfg: ExperimentConfig, config_path: str, override: str | None) -> Path:
    if override:
        out = Path(override)
    elif cfg.output_dir:
        out = Path(cfg.output_dir)
    else:
        out = Path(os.environ.get(OUTPUT_ROOT_ENV, "runs")) / Path(config_path).stem
    out.mkdir(parents=True, exist_ok=True)
    return out


def _inputs_for(cfg, problem, oracle, algo, T, w1) -> bounds.BoundInputs:
    noise = analysis_noise(oracle, T, cfg.delta)
    eta = algo.eta if isinstance(algo, AdaSgdConfig) else algo.stepsize
    gamma = algo.gamma if isinstance(algo, AdaSgdConfig) else 1.0
    d1 = 0.0 if problem.minimizer is None else math.sqrt(float(problem.dist_sq(w1)))
    alpha = algo.alpha if isinstance(algo, KnownParamConfig) else None
    return bounds.BoundInputs(problem.beta, noise.sigma0, noise.sigma1, eta, gamma, T, cfg.delta,
                              float(problem.gap(w1)), d1, alpha)


def _exp_run(cfg, out, jobs):
    problem = cfg.problem.build()
    oracle = cfg.oracle.build(cfg.T)
    w1 = cfg.start_point(problem)
    algo = cfg.build_algorithm(problem, oracle, cfg.T)
    traj = run(problem, oracle, algo, cfg.T, RngStream(cfg.seed), w1)
    traj.to_csv(out / "trajectory.csv")
    rep = bounds.report(_inputs_for(cfg, problem, oracle, algo, cfg.T, w1)).to_dict()
    write_json(out / "bounds.json", rep)
    noise = oracle.bound_params() if oracle.bounded else None
    checks = check_trajectory(traj, problem, noise)
    summary = {
        "kind": "run",
        "T": cfg.T,
        "final_f_gap": traj.f_gap[-1],
        "max_f_gap": traj.max_f_gap[-1],
        "max_dist": traj.max_dist[-1],
        "avg_gap": traj.avg_gap,
        "f_bound": rep["f_bound"],
        "checks": {c.name: {"passed": c.passed, "min_slack": c.min_slack} for c in checks},
        "passed": all(c.passed for c in checks),
    }
    write_json(out / "summary.json", summary)
    lines = [
        f"run: T={cfg.T}  final gap={traj.f_gap[-1]:.6g}  max gap={traj.max_f_gap[-1]:.6g}  F={rep['f_bound']:.6g}",
        *(f"  {c.name:<18} {'pass' if c.passed else 'FAIL'}  min slack {c.min_slack:.3g}" for c in checks),
    ]
    return summary["passed"], lines


def _exp_coverage(cfg, out, jobs):
    problem = cfg.problem.build()
    oracle = cfg.oracle.build(cfg.T)
    w1 = cfg.start_point(problem)
    algo = cfg.build_algorithm(problem, oracle, cfg.T)
    res = coverage_experiment(cfg.theorem, problem, oracle, algo, cfg.T, cfg.delta, cfg.trials, cfg.seed, w1, jobs)
    write_table(out / "trials.csv", res.per_trial)
    rep = bounds.report(_inputs_for(cfg, problem, oracle, algo, cfg.T, w1)).to_dict()
    write_json(out / "bounds.json", rep)
    summary = res.summary()
    ok = res.passed
    if cfg.min_rate_coverage is not None:
        rate_cov = 1 - res.rate_frequency
        summary["rate_coverage"] = rate_cov
        summary["min_rate_coverage"] = cfg.min_rate_coverage
        ok = ok and rate_cov >= cfg.min_rate_coverage
    summary["passed"] = ok
    write_json(out / "summary.json", summary)
    lines = [
        f"coverage {res.theorem}: {res.violations}/{res.trials} violations "
        f"(freq {res.frequency:.4f} <= {res.threshold:.4f}: {'pass' if res.passed else 'FAIL'})",
        f"  bound {res.bound:.6g}  worst {res.worst:.6g}",
        f"  rate bound {res.rate_bound:.6g}  worst {res.worst_rate:.6g}  rate violations {res.rate_violations}",
    ]
    return ok, lines


def _exp_ratefit(cfg, out, jobs):
    problem = cfg.problem.build()
    T0 = cfg.T_grid[0]
    oracle = cfg.oracle.build(T0)
    w1 = cfg.start_point(problem)
    algo = cfg.build_algorithm(problem, oracle, T0)
    fit = rate_fit_experiment(problem, oracle, algo, cfg.T_grid, cfg.trials, cfg.seed, cfg.metric, w1)
    write_table(out / "rates.csv", {"T": fit.T_grid, cfg.metric: fit.values})
    summary = fit.summary()
    ok = not math.isnan(fit.slope)
    if cfg.expect_slope is not None:
        lo, hi = cfg.expect_slope
        ok = ok and lo <= fit.slope <= hi
        summary["expect_slope"] = [lo, hi]
    summary["passed"] = ok
    write_json(out / "summary.json", summary)
    lines = [f"ratefit {cfg.metric}: slope {fit.slope:.4f} +- {fit.stderr:.4f}"
             + (f"  expected [{cfg.expect_slope[0]}, {cfg.expect_slope[1]}]" if cfg.expect_slope else "")
             + f"  {'pass' if ok else 'FAIL'}"]
    return ok, lines


def _exp_lowerbound(cfg, out, jobs):
    res = lower_bound_experiment(cfg.sigma, cfg.gammas, cfg.T, cfg.beta, cfg.seed)
    cols = {k: [getattr(r, k) for r in res.rows] for k in
            ("gamma", "w_final", "normalized", "half_sum", "integral_bound", "rel_err_half_sum", "full_sum", "rel_err_full_sum", "min_iterate")}
    write_table(out / "lowerbound.csv", cols)
    write_json(out / "summary.json", res.summary())
    lines = [f"lowerbound sigma={res.sigma} T={res.T} beta={res.beta:.3g}: {'pass' if res.passed else 'FAIL'}"]
    lines += [f"  gamma={r.gamma:<10.4g} w_T+1={r.w_final:.6g}  w*gamma/sigma={r.normalized:.4f}  vs half-sum {r.rel_err_half_sum:+.3f}" for r in res.rows]
    return res.passed, lines


def _exp_concentration(cfg, out, jobs):
    res = concentration_trial(cfg.inequality, cfg.generator, cfg.delta, cfg.trials, cfg.seed, cfg.T, cfg.lam)
    write_json(out / "summary.json", res.summary())
    return res.passed, [f"{res.kind}/{res.generator}: {res.failures}/{res.trials} failures "
                        f"(freq {res.frequency:.4f} <= {res.threshold:.4f}: {'pass' if res.passed else 'FAIL'})"]


def _exp_lemmas(cfg, out, jobs):
    cases = lemma_matrix(cfg.T, cfg.trials_per_case, cfg.seed)
    rows = [(c.label, k.name, k.passed, k.min_slack) for c in cases for k in c.checks]
    write_table(out / "lemmas.csv", {
        "case": [r[0] for r in rows], "check": [r[1] for r in rows],
        "passed": [int(r[2]) for r in rows], "min_slack": [r[3] for r in rows],
    })
    ok = all(c.passed for c in cases)
    failed = [c.label for c in cases if not c.passed]
    write_json(out / "summary.json", {"cases": len(cases), "runs": sum(c.trials for c in cases),
                                     "failed": failed, "passed": ok})
    return ok, [f"lemmas: {len(cases)} cases, {sum(c.trials for c in cases)} runs, {len(failed)} failing"]


EXPERIMENTS = {
    "run": _exp_run,
    "coverage": _exp_coverage,
    "ratefit": _exp_ratefit,
    "lowerbound": _exp_lowerbound,
    "concentration": _exp_concentration,
    "lemmas": _exp_lemmas,
}


def run_config(path: str, seed: int | None = None, out_override: str | None = None, jobs: int = 1) -> int:
    try:
        cfg = load_config(path)
        if seed is not None:
            cfg = cfg.model_copy(update={"seed": seed})
        out = output_dir(cfg, path, out_override)
        write_json(out / "effective_config.json", cfg.effective())
        ok, lines = EXPERIMENTS[cfg.kind](cfg, out, jobs)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConfigurationError, InvalidInput, UnsupportedQuery) as exc:
        print(f"error: {path}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print("\n".join(lines))
    print(f"outputs in {out}")
    return EXIT_OK if ok else EXIT_FAIL


def print_bounds(args) -> int:
    try:
        p = bounds.BoundInputs(args.beta, args.sigma0, args.sigma1, args.eta, args.gamma, args.T, args.delta,
                               args.delta1, args.d1, args.alpha)
        rep = bounds.report(p, subgaussian=args.subgaussian)
    except InvalidInput as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    data = rep.to_dict()
    if args.alpha is not None and args.beta > 0 and args.delta < 0.5:
        data["known_stepsize"] = known_stepsize(KnownParamConfig(args.beta, args.sigma0, args.sigma1, args.delta, args.T, args.alpha))
    if args.json:
        print(json.dumps(_clean(data), indent=2, sort_keys=True))
        return EXIT_OK
    label = "sub-Gaussian" if args.subgaussian else "bounded"
    print(f"bound constants ({label} noise)")
    for name in ("c1", "f_bound", "c2", "lemma13_c", "d_bound_sq", "nonconvex_rate_rhs", "convex_rate_rhs",
                 "known_f_bound", "known_rate_rhs", "known_stepsize", "regime"):
        if name in data and data[name] is not None:
            v = data[name]
            print(f"  {name:<20} {v if isinstance(v, str) else repr(float(v))}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="adasgd", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run an experiment config")
    r.add_argument("config")
    r.add_argument("--seed", type=int, help="override the master seed")
    r.add_argument("--output-dir", help="override the output directory")
    r.add_argument("--jobs", type=int, default=1, help="worker processes for trial chunks")
    b = sub.add_parser("bounds", help="print bound constants")
    for name, default in (("beta", None), ("sigma0", 0.0), ("sigma1", 0.0), ("eta", None), ("gamma", None),
                          ("delta", None), ("delta1", 0.0), ("d1", 0.0)):
        b.add_argument(f"--{name}", type=float, default=default, required=default is None)
    b.add_argument("--T", type=int, required=True)
    b.add_argument("--alpha", type=float)
    b.add_argument("--subgaussian", action="store_true", help="use the sub-Gaussian (inflated-noise) formulas")
    b.add_argument("--json", action="store_true")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run":
        return run_config(args.config, args.seed, args.output_dir, args.jobs)
    return print_bounds(args)


if __name__ == "__main__":
    sys.exit(main())
