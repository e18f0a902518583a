"""Command-line front end.

Subcommands: simulate (export one latent path), run (replicated experiment),
sweep (parameter sweep), bounds (closed-form bound table for an environment),
entropy (entropy-rate estimates), tau-eff (effective-horizon estimate), and
figure (figure-ready CSV tables).

Exit codes: 0 success, 1 user error (bad flags/config), 2 internal or
numeric failure.  Seeds are always explicit; there is no wall-clock seeding.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import replace

import numpy as np

from . import harness, infometrics
from .envs import (
    ArticlePoolEnv,
    BernoulliRewards,
    GaussianNoise,
    GPTwoType,
    MarkovSwitchEnv,
    RenewalLBEnv,
    default_reward_model,
    env_from_dict,
    env_to_dict,
    path_to_csv,
    realize,
)
from .harness import config_from_dict, config_to_dict, emit_figure_data, format_cell

DEFAULT_D_GRID = (0.05, 0.1, 0.2, 0.5, 1.0)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _load_json(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except FileNotFoundError:
        raise UsageError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise UsageError(f"malformed JSON in {path}: {exc}")


def _write_table(args, columns, rows, meta=None):
    """Write a table as CSV or JSON to --out (stdout with '-')."""
    if args.format == "json":
        payload = [dict(zip(columns, row)) for row in rows]
        text = json.dumps(payload, indent=2, default=float) + "\n"
    else:
        lines = [",".join(columns)]
        for row in rows:
            lines.append(",".join(format_cell(x) for x in row))
        text = "\n".join(lines) + "\n"
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        if meta is not None:
            with open(args.out + ".meta.json", "w", encoding="utf-8") as f:
                json.dump(meta, f, indent=2, sort_keys=True, default=float)
                f.write("\n")


def _resolved_config(args) -> harness.ExperimentConfig:
    cfg = config_from_dict(_load_json(args.config))
    if args.seed is not None:
        cfg = replace(cfg, master_seed=args.seed)
    if args.T is not None:
        cfg = replace(cfg, T=args.T)
    if args.S is not None:
        cfg = replace(cfg, S=args.S)
    return cfg


def _dry_run(payload: dict) -> int:
    sys.stdout.write(json.dumps(payload, indent=2, sort_keys=True, default=float) + "\n")
    return 0


def _threads(args) -> int:
    return args.threads if args.threads is not None else (os.cpu_count() or 1)


def _cmd_run(args) -> int:
    cfg = _resolved_config(args)
    if args.dry_run:
        return _dry_run(config_to_dict(cfg))
    estimates = harness.run_experiment(cfg, threads=_threads(args))
    columns = ["policy", "mean", "stderr", "n"]
    rows = [[e.policy, e.mean, e.stderr, e.n] for e in estimates]
    _write_table(args, columns, rows, meta=harness.run_metadata(cfg, estimates))
    if cfg.trace and args.out != "-":
        trace_rows = []
        for e in estimates:
            for t in range(cfg.T):
                trace_rows.append([t + 1, e.policy, float(e.trace[t])])
        trace_path = args.out + ".trace.csv"
        with open(trace_path, "w", encoding="utf-8", newline="") as f:
            f.write("t,policy,instantaneous_regret\n")
            for row in trace_rows:
                f.write(",".join(format_cell(x) for x in row) + "\n")
    return 0


def _cmd_sweep(args) -> int:
    cfg = _resolved_config(args)
    try:
        values = [float(v) for v in args.values.split(",") if v != ""]
    except ValueError:
        raise UsageError(f"--values must be a comma-separated number list, got {args.values!r}")
    if not values:
        raise UsageError("--values is empty")
    if args.dry_run:
        return _dry_run({"config": config_to_dict(cfg), "axis": args.axis, "values": values})
    swept = harness.sweep(cfg, args.axis, values, threads=_threads(args))
    columns = [args.axis, "policy", "mean", "stderr", "n"]
    rows = []
    for value, estimates in swept:
        for e in estimates:
            rows.append([value, e.policy, e.mean, e.stderr, e.n])
    _write_table(args, columns, rows,
                 meta=harness.run_metadata(cfg, None, axis=args.axis, values=values))
    return 0


def _cmd_figure(args) -> int:
    cfg = _resolved_config(args)
    if args.dry_run:
        return _dry_run({"config": config_to_dict(cfg), "figure": args.id})
    fig = emit_figure_data(cfg, args.id, threads=_threads(args))
    _write_table(args, fig.columns, fig.rows,
                 meta=harness.run_metadata(cfg, None, figure=args.id, **fig.meta))
    return 0


def _cmd_simulate(args) -> int:
    env = env_from_dict(_load_json(args.env))
    if args.dry_run:
        return _dry_run({"env": env_to_dict(env), "T": args.T, "seed": args.seed,
                         "path_index": args.path_index})
    rng = harness._path_rng(args.seed, args.path_index)
    path = realize(env, args.T, rng)
    if args.out == "-":
        path_to_csv(path, sys.stdout)
    else:
        with open(args.out, "w", encoding="utf-8", newline="") as f:
            path_to_csv(path, f)
    return 0


def _default_sigma(env) -> float:
    model = default_reward_model(env)
    if isinstance(model, GaussianNoise):
        return math.sqrt(model.sigma_sq)
    if isinstance(model, BernoulliRewards):
        # sub-Gaussian variance proxy for [0, 1] rewards
        return 0.5
    raise ValueError("no default sigma for this reward model")


def _env_tau_eff(env):
    if isinstance(env, GPTwoType):
        return infometrics.rice_effective_horizon(env.tau_id), "zero_crossing"
    if isinstance(env, MarkovSwitchEnv):
        if env.spec.delta <= 0:
            return None, None
        return 1.0 / env.spec.delta, "switch_probability"
    if isinstance(env, ArticlePoolEnv):
        return infometrics.news_effective_horizon(env.k, env.spec.tau), "article_pool"
    if isinstance(env, RenewalLBEnv):
        return env.spec.tau_eff, "construction_target"
    return None, None


def _cmd_bounds(args) -> int:
    env = env_from_dict(_load_json(args.env))
    sigma = args.sigma if args.sigma is not None else _default_sigma(env)
    d_grid = DEFAULT_D_GRID if args.D_grid is None else tuple(
        float(x) for x in args.D_grid.split(",")
    )
    if args.dry_run:
        return _dry_run({"env": env_to_dict(env), "sigma": sigma, "T": args.T,
                         "S": args.S, "seed": args.seed, "D_grid": list(d_grid)})
    k = env.k
    T = args.T
    reports = []

    tau_eff, tau_kind = _env_tau_eff(env)
    h_rate = None
    if tau_eff is not None:
        reports.append(infometrics.BoundReport(
            "tau_eff", tau_eff, {"method": tau_kind}))
        h_cond = math.log(k - 1)
        h_rate = infometrics.effective_horizon_bound(tau_eff, h_cond, math.log(k), T)
        reports.append(infometrics.BoundReport(
            "entropy_effective_horizon", h_rate,
            {"tau_eff": tau_eff, "h_cond": h_cond, "h_first": math.log(k), "T": T,
             "units": "nats_per_period"}))
        s_bar = (1.0 + (T - 1) / tau_eff) / T
        reports.append(infometrics.BoundReport(
            "entropy_switch_rate", infometrics.combinatorial_entropy_bound(s_bar, T, k),
            {"s_bar": s_bar, "T": T, "k": k, "units": "nats_per_period"}))

    if isinstance(env, MarkovSwitchEnv):
        h_closed = infometrics.entropy_rate_markov_switch(k, env.spec.delta)
        reports.append(infometrics.BoundReport(
            "entropy_closed_form", h_closed,
            {"k": k, "delta": env.spec.delta, "units": "nats_per_period"}))
        if h_rate is None:
            h_rate = h_closed

    if h_rate is not None:
        reports.append(infometrics.BoundReport(
            "regret_karmed", infometrics.regret_bound_karmed(sigma, k, h_rate),
            {"sigma": sigma, "k": k, "h_rate": h_rate}))
        reports.append(infometrics.BoundReport(
            "regret_fullinfo", infometrics.regret_bound_fullinfo(sigma, h_rate),
            {"sigma": sigma, "h_rate": h_rate}))

    if T >= 2:
        if args.seed is None:
            raise UsageError("--seed is required (variation budget is estimated from paths)")
        rng = harness._aux_rng(args.seed, 3)
        v_hat = float(np.mean([
            infometrics.variation_budget(realize(env, T, rng)) for _ in range(args.S)
        ]))
        reports.append(infometrics.BoundReport(
            "variation_budget_hat", v_hat, {"T": T, "paths": args.S}))
        gamma_u = infometrics.info_ratio_bound("k_armed", sigma, k=k)
        for d_val in d_grid:
            reports.append(infometrics.BoundReport(
                f"rate_distortion_D{d_val:g}",
                infometrics.rate_distortion_bound(v_hat, d_val, T, k),
                {"v_bar": v_hat, "D": d_val, "T": T, "k": k, "units": "nats_per_period"}))
        reports.append(infometrics.BoundReport(
            "regret_variation", infometrics.regret_bound_variation(gamma_u, v_hat, k, T),
            {"gamma_u": gamma_u, "v_bar": v_hat, "k": k, "T": T}))

    columns = ["name", "value", "inputs"]
    rows = [[r.name, r.value, json.dumps(r.inputs, sort_keys=True)] for r in reports]
    if args.format == "csv":
        # inputs-json contains commas; quote via the csv module instead of join
        import csv as _csv

        if args.out == "-":
            w = _csv.writer(sys.stdout)
            w.writerow(columns)
            for row in rows:
                w.writerow([format_cell(x) for x in row])
        else:
            with open(args.out, "w", encoding="utf-8", newline="") as f:
                w = _csv.writer(f)
                w.writerow(columns)
                for row in rows:
                    w.writerow([format_cell(x) for x in row])
        return 0
    _write_table(args, columns, rows)
    return 0


def _cmd_entropy(args) -> int:
    env = env_from_dict(_load_json(args.env))
    if args.dry_run:
        return _dry_run({"env": env_to_dict(env), "method": args.method, "order": args.order,
                         "paths": args.paths, "T": args.T, "seed": args.seed})
    if args.method == "closed_form":
        if not isinstance(env, MarkovSwitchEnv):
            raise UsageError("closed_form entropy requires a markov_switch environment")
        est = infometrics.EntropyEstimate(
            value=infometrics.entropy_rate_markov_switch(env.k, env.spec.delta),
            method="closed_form")
    elif args.method == "brute_force":
        if not isinstance(env, MarkovSwitchEnv):
            raise UsageError("brute_force entropy requires a markov_switch environment")
        law = infometrics.markov_switch_path_law(env.k, env.spec.delta, args.T)
        est = infometrics.EntropyEstimate(
            value=infometrics.entropy_rate_bruteforce(law, args.T), method="brute_force")
    else:
        if args.seed is None:
            raise UsageError("--seed is required for the plug-in estimator")
        rng = harness._aux_rng(args.seed, 4)
        paths = np.stack([realize(env, args.T, rng).opt for _ in range(args.paths)])
        est = infometrics.entropy_rate_plugin(paths, order=args.order)
        if not isinstance(env, (MarkovSwitchEnv, RenewalLBEnv)):
            est = infometrics.EntropyEstimate(
                est.value, est.method + "_approx", est.order, est.stderr, est.low_count_warning)
    columns = ["method", "value_nats", "order", "stderr_nats", "low_count_warning"]
    rows = [[est.method, est.value, est.order, est.stderr, est.low_count_warning]]
    _write_table(args, columns, rows)
    return 0


def _cmd_tau_eff(args) -> int:
    env = env_from_dict(_load_json(args.env))
    if args.dry_run:
        return _dry_run({"env": env_to_dict(env), "T": args.T, "S": args.S, "seed": args.seed})
    est = harness.estimate_tau_eff(env, args.T, args.S, harness._aux_rng(args.seed, 5))
    columns = ["tau_eff_hat", "censored", "total_switches", "paths"]
    rows = [[est.value, est.censored, est.total_switches, est.n_paths]]
    _write_table(args, columns, rows)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nsbandit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config=False, env=False, seed_required=False):
        if config:
            p.add_argument("--config", required=True, help="experiment config JSON")
            p.add_argument("--seed", type=int, default=None, help="master seed override")
            p.add_argument("--T", type=int, default=None, help="horizon override")
            p.add_argument("--S", type=int, default=None, help="replication override")
            p.add_argument("--threads", type=int, default=None,
                           help="parallel replication processes (default: all cores)")
        if env:
            p.add_argument("--env", required=True, help="environment spec JSON")
            p.add_argument("--seed", type=int, default=None, required=seed_required)
        p.add_argument("--out", default="-", help="output path ('-' = stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--dry-run", action="store_true", dest="dry_run",
                       help="print the resolved config and exit")

    p = sub.add_parser("run", help="run one replicated experiment")
    common(p, config=True)
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("sweep", help="sweep a numeric config field")
    common(p, config=True)
    p.add_argument("--axis", required=True, help="dotted config path, e.g. env.tau_id")
    p.add_argument("--values", required=True, help="comma-separated numbers")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("figure", help="emit data behind one of the known figures")
    common(p, config=True)
    p.add_argument("--id", required=True, choices=harness.FIGURE_IDS)
    p.set_defaults(func=_cmd_figure)

    p = sub.add_parser("simulate", help="export one realized latent path as CSV")
    common(p, env=True, seed_required=True)
    p.add_argument("--T", type=int, required=True)
    p.add_argument("--path-index", type=int, default=0, dest="path_index",
                   help="replication index of the exported path")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("bounds", help="closed-form bound table for an environment")
    common(p, env=True)
    p.add_argument("--sigma", type=float, default=None,
                   help="reward sub-Gaussian scale (default: from the reward model)")
    p.add_argument("--T", type=int, default=1000)
    p.add_argument("--S", type=int, default=100, help="paths for the variation-budget estimate")
    p.add_argument("--D-grid", default=None, dest="D_grid",
                   help="comma-separated distortion grid")
    p.set_defaults(func=_cmd_bounds)

    p = sub.add_parser("entropy", help="entropy-rate estimates for an environment")
    common(p, env=True)
    p.add_argument("--method", required=True, choices=("closed_form", "plugin", "brute_force"))
    p.add_argument("--order", type=int, default=1, help="plug-in Markov order")
    p.add_argument("--paths", type=int, default=10, help="plug-in sample paths")
    p.add_argument("--T", type=int, default=10000)
    p.set_defaults(func=_cmd_entropy)

    p = sub.add_parser("tau-eff", help="estimate the effective horizon of an environment")
    common(p, env=True, seed_required=True)
    p.add_argument("--T", type=int, default=1000)
    p.add_argument("--S", type=int, default=100)
    p.set_defaults(func=_cmd_tau_eff)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # numeric/internal failures
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
