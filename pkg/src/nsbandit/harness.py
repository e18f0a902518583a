"""Experiment orchestration.

Runs replicated bandit experiments in which every policy plays the same
realized latent path per replication (with its own reward-noise and
exploration stream), estimates per-period regret with standard errors,
sweeps parameters, estimates effective horizons from sampled optimal-action
sequences, and emits figure-ready CSV tables.

Replications are independent tasks seeded by counter (master_seed, s), and
reduction order is fixed, so results are byte-identical for any thread
count.
"""
from __future__ import annotations

import hashlib
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import partial
from typing import Optional

import numpy as np
from threadpoolctl import threadpool_limits

from . import infometrics
from .envs import (
    EnvSpec,
    FixedPlusGPEnv,
    GPTwoType,
    LatentPath,
    default_reward_model,
    draw_reward,
    env_from_dict,
    env_to_dict,
    realize,
    regret_of_sequence,
)
from .gaussian import NotPositiveDefinite
from .processes import SEKernel, gp_path_jitter
from .policies import policy_from_dict, policy_to_dict

__all__ = [
    "ExperimentConfig",
    "RegretEstimate",
    "TauEffEstimate",
    "FigureData",
    "run_experiment",
    "sweep",
    "estimate_tau_eff",
    "emit_figure_data",
    "FIGURE_IDS",
    "config_to_dict",
    "config_from_dict",
    "run_metadata",
    "format_cell",
]

#: Reconstruction defaults for the sweep figures (the source grids are not
#: fully enumerated anywhere; override via config + sweep for other grids).
FIG2_TAU_ID_GRID = (10.0, 50.0, 100.0)
FIG2_TAU_CM_GRID = (10.0, 50.0, 100.0)
FIGC2_TAU_ID_GRID = (1.0, 5.0, 10.0, 25.0, 50.0, 75.0, 100.0)

FIGURE_IDS = ("fig2_left", "fig2_right", "figC1", "figC2", "figC4", "figC5")


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment: an environment, policies, horizon, and replication count."""

    env: EnvSpec
    policies: tuple
    T: int
    S: int
    master_seed: int
    trace: bool = False

    def __post_init__(self):
        if self.T < 1 or self.S < 1:
            raise ValueError("need T >= 1 and S >= 1")
        if self.master_seed < 0:
            raise ValueError("master_seed must be a nonnegative integer")
        if len(self.policies) == 0:
            raise ValueError("need at least one policy")
        ids = [p.policy_id for p in self.policies]
        if len(set(ids)) != len(ids):
            raise ValueError(f"duplicate policy ids: {ids}")


@dataclass
class RegretEstimate:
    """Per-policy regret estimate across replications."""

    policy: str
    mean: float
    stderr: float
    n: int
    trace: Optional[np.ndarray] = None
    n_excluded: int = 0


@dataclass(frozen=True)
class TauEffEstimate:
    """Effective-horizon estimate from sampled optimal-action sequences.

    ``censored`` marks runs with zero observed switches, where the estimate
    is reported as the horizon T (a lower bound) rather than dividing by 0.
    """

    value: float
    censored: bool
    total_switches: int
    n_paths: int


@dataclass
class FigureData:
    figure_id: str
    columns: list
    rows: list
    meta: dict = field(default_factory=dict)


def _stable_hash(text: str) -> int:
    return int.from_bytes(hashlib.sha256(text.encode()).digest()[:4], "little")


def _path_rng(master_seed: int, s: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=(0, s)))


def _policy_rng(master_seed: int, s: int, policy_id: str) -> np.random.Generator:
    key = (1, s, _stable_hash(policy_id))
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=key))


def _aux_rng(master_seed: int, tag: int, s: int = 0) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=(2, tag, s)))


def play_policy(path: LatentPath, policy, model, rng: np.random.Generator) -> np.ndarray:
    """Run the sequential act/observe protocol over one path; returns actions."""
    actions = np.empty(path.T, dtype=np.int64)
    for t in range(1, path.T + 1):
        a = policy.act(t, rng)
        r = draw_reward(path, model, t, a, rng)
        policy.observe(t, a, r)
        actions[t - 1] = a
    return actions


def _play_replication(cfg: ExperimentConfig, s: int):
    """One replication: realize a shared path, play every policy on it.

    Returns (regrets, traces) keyed by policy id; a None regret marks a
    numerically failed (excluded) policy-replication.
    """
    with threadpool_limits(limits=1):
        regrets: dict[str, Optional[float]] = {}
        traces: dict[str, Optional[np.ndarray]] = {}
        try:
            path = realize(cfg.env, cfg.T, _path_rng(cfg.master_seed, s))
        except NotPositiveDefinite:
            for spec in cfg.policies:
                regrets[spec.policy_id] = None
                traces[spec.policy_id] = None
            return regrets, traces
        model = default_reward_model(cfg.env)
        rows = np.arange(cfg.T)
        opt_mu = path.mu[rows, path.opt]
        for spec in cfg.policies:
            pid = spec.policy_id
            try:
                policy = spec.build(cfg.env, cfg.T)
                if hasattr(policy, "bind_path"):
                    policy.bind_path(path)
                actions = play_policy(path, policy, model, _policy_rng(cfg.master_seed, s, pid))
            except NotPositiveDefinite:
                regrets[pid] = None
                traces[pid] = None
                continue
            regrets[pid] = regret_of_sequence(path, actions)
            traces[pid] = opt_mu - path.mu[rows, actions] if cfg.trace else None
        return regrets, traces


def run_experiment(cfg: ExperimentConfig, threads: Optional[int] = None) -> list[RegretEstimate]:
    """Estimate each policy's per-period regret over S shared-path replications.

    Replication s realizes one latent path from seed (master_seed, s); every
    policy plays that same path with its own exploration/reward-noise stream
    seeded by (master_seed, s, policy_id).  Numerically failed
    policy-replications are excluded with a recorded count; more than 1%
    exclusions for any policy is a hard error.

    Args:
        cfg: experiment description.
        threads: worker processes (default 1); results do not depend on it.
    """
    threads = 1 if threads is None else max(1, threads)
    worker = partial(_play_replication, cfg)
    if threads == 1 or cfg.S == 1:
        results = [worker(s) for s in range(cfg.S)]
    else:
        chunk = max(1, cfg.S // (4 * threads))
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(worker, range(cfg.S), chunksize=chunk))

    estimates = []
    for spec in cfg.policies:
        pid = spec.policy_id
        vals = np.array([r[pid] for r, _ in results if r[pid] is not None])
        excluded = cfg.S - vals.size
        if excluded > 0.01 * cfg.S:
            raise RuntimeError(
                f"policy {pid}: {excluded}/{cfg.S} replications excluded (> 1%); aborting"
            )
        mean = float(vals.mean())
        stderr = float(vals.std(ddof=1) / math.sqrt(vals.size)) if vals.size > 1 else 0.0
        trace = None
        if cfg.trace:
            acc = np.zeros(cfg.T)
            for _, tr in results:
                if tr[pid] is not None:
                    acc += tr[pid]
            trace = acc / vals.size
        estimates.append(
            RegretEstimate(policy=pid, mean=mean, stderr=stderr, n=int(vals.size),
                           trace=trace, n_excluded=int(excluded))
        )
    return estimates


def estimate_tau_eff(env: EnvSpec, T: int, S: int, rng: np.random.Generator) -> TauEffEstimate:
    """Estimate the effective horizon from S realized optimal-action sequences.

    Uses the per-period switch frequency: (T-1) * S / (total observed
    switches).  With zero observed switches the estimate is censored at T.
    """
    if T < 2 or S < 1:
        raise ValueError("need T >= 2 and S >= 1")
    total = 0
    for _ in range(S):
        opt = realize(env, T, rng).opt
        total += int(np.count_nonzero(opt[1:] != opt[:-1]))
    if total == 0:
        return TauEffEstimate(value=float(T), censored=True, total_switches=0, n_paths=S)
    return TauEffEstimate(
        value=(T - 1) * S / total, censored=False, total_switches=total, n_paths=S
    )


def config_to_dict(cfg: ExperimentConfig) -> dict:
    return {
        "env": env_to_dict(cfg.env),
        "policies": [policy_to_dict(p) for p in cfg.policies],
        "T": cfg.T,
        "S": cfg.S,
        "master_seed": cfg.master_seed,
        "outputs": {"trace": cfg.trace},
    }


def config_from_dict(d: dict) -> ExperimentConfig:
    if not isinstance(d, dict):
        raise ValueError("experiment config must be a JSON object")
    for key in ("env", "policies", "T", "S", "master_seed"):
        if key not in d:
            raise ValueError(f"experiment config is missing required field {key!r}")
    if not isinstance(d["policies"], list) or not d["policies"]:
        raise ValueError("'policies' must be a nonempty list")
    outputs = d.get("outputs", {})
    if not isinstance(outputs, dict):
        raise ValueError("'outputs' must be an object")
    return ExperimentConfig(
        env=env_from_dict(d["env"]),
        policies=tuple(policy_from_dict(p) for p in d["policies"]),
        T=int(d["T"]),
        S=int(d["S"]),
        master_seed=int(d["master_seed"]),
        trace=bool(outputs.get("trace", False)),
    )


def _set_by_path(d: dict, dotted: str, value) -> None:
    parts = dotted.split(".")
    cur = d
    for p in parts[:-1]:
        if isinstance(cur, list):
            cur = cur[int(p)]
        elif isinstance(cur, dict) and p in cur:
            cur = cur[p]
        else:
            raise ValueError(f"unknown axis path {dotted!r} (at {p!r})")
    last = parts[-1]
    if isinstance(cur, list):
        cur[int(last)] = value
    elif isinstance(cur, dict) and last in cur:
        cur[last] = value
    else:
        raise ValueError(f"unknown axis path {dotted!r} (at {last!r})")


def sweep(
    base: ExperimentConfig,
    axis: str,
    values,
    threads: Optional[int] = None,
) -> list[tuple[float, list[RegretEstimate]]]:
    """Run one experiment per axis value, sharing the master seed.

    ``axis`` is a dotted path into the config's dict form, e.g.
    "env.tau_id" or "policies.0.L".
    """
    out = []
    for value in values:
        d = config_to_dict(base)
        _set_by_path(d, axis, value)
        cfg = config_from_dict(d)
        out.append((value, run_experiment(cfg, threads=threads)))
    return out


def _gp_jitter_info(env: EnvSpec, T: int) -> dict:
    info = {}
    if isinstance(env, GPTwoType):
        info["id"] = gp_path_jitter(SEKernel(1.0, env.tau_id), T)
        info["cm"] = gp_path_jitter(SEKernel(1.0, env.tau_cm), T)
    elif isinstance(env, FixedPlusGPEnv):
        info["gp"] = gp_path_jitter(SEKernel(1.0, env.tau), T)
    return info


def run_metadata(cfg: ExperimentConfig, estimates: Optional[list[RegretEstimate]] = None, **extra) -> dict:
    """Deterministic sidecar metadata for an experiment's outputs."""
    from . import __version__

    meta = {
        "package": "nsbandit",
        "version": __version__,
        "config": config_to_dict(cfg),
        "gp_jitter": _gp_jitter_info(cfg.env, cfg.T),
    }
    if estimates is not None:
        meta["exclusions"] = {e.policy: e.n_excluded for e in estimates}
    meta.update(extra)
    return meta


def format_cell(x) -> str:
    """CSV cell formatting: shortest round-trip floats, empty for None."""
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _estimates_rows(swept) -> list:
    rows = []
    for value, estimates in swept:
        for est in estimates:
            rows.append([value, est.policy, est.mean, est.stderr, est.n])
    return rows


def emit_figure_data(cfg: ExperimentConfig, figure_id: str, threads: Optional[int] = None) -> FigureData:
    """Compute the long-format table behind one of the known figures.

    Deterministic given cfg.master_seed.  Figure grids default to the
    documented reconstruction grids; run a custom sweep for other grids.
    """
    if figure_id not in FIGURE_IDS:
        raise ValueError(f"unknown figure id {figure_id!r}; known: {FIGURE_IDS}")

    if figure_id in ("fig2_left", "fig2_right", "figC5"):
        if not isinstance(cfg.env, GPTwoType):
            raise ValueError(f"{figure_id} requires a gp_two_type environment")

    if figure_id == "fig2_left":
        swept = sweep(cfg, "env.tau_id", list(FIG2_TAU_ID_GRID), threads=threads)
        return FigureData(figure_id, ["tau_id", "policy", "mean", "stderr", "n"],
                          _estimates_rows(swept))

    if figure_id == "fig2_right":
        swept = sweep(cfg, "env.tau_cm", list(FIG2_TAU_CM_GRID), threads=threads)
        return FigureData(figure_id, ["tau_cm", "policy", "mean", "stderr", "n"],
                          _estimates_rows(swept))

    if figure_id == "figC1":
        path = realize(cfg.env, cfg.T, _path_rng(cfg.master_seed, 0))
        cols = ["t"]
        extras = []
        if "theta_cm" in path.meta:
            cols.append("theta_cm")
            extras.append(lambda t, p=path: float(p.meta["theta_cm"][t]))
        if "theta_id" in path.meta:
            for a in range(path.k):
                cols.append(f"theta_id_{a + 1}")
                extras.append(lambda t, p=path, a=a: float(p.meta["theta_id"][t, a]))
        cols += [f"mu_{a + 1}" for a in range(path.k)] + ["opt"]
        rows = []
        for t in range(path.T):
            row = [t + 1] + [fn(t) for fn in extras]
            row += [float(x) for x in path.mu[t]] + [int(path.opt[t]) + 1]
            rows.append(row)
        return FigureData(figure_id, cols, rows)

    if figure_id == "figC2":
        if not isinstance(cfg.env, GPTwoType):
            raise ValueError("figC2 requires a gp_two_type environment")
        rows = []
        for i, tau_id in enumerate(FIGC2_TAU_ID_GRID):
            env = replace(cfg.env, tau_id=float(tau_id))
            est = estimate_tau_eff(env, cfg.T, cfg.S, _aux_rng(cfg.master_seed, 1, i))
            rows.append([float(tau_id), est.value, infometrics.rice_effective_horizon(tau_id)])
        return FigureData(figure_id, ["tau_id", "tau_eff_hat", "tau_eff_rice"], rows)

    if figure_id == "figC4":
        traced = replace(cfg, trace=True)
        estimates = run_experiment(traced, threads=threads)
        rows = []
        for est in estimates:
            for t in range(cfg.T):
                rows.append([t + 1, est.policy, float(est.trace[t])])
        return FigureData(figure_id, ["t", "policy", "instantaneous_regret"], rows)

    # figC5: left-panel sweep plus the k-armed bound evaluated through the
    # effective-horizon entropy bound at tau_eff(tau_id)
    swept = sweep(cfg, "env.tau_id", list(FIG2_TAU_ID_GRID), threads=threads)
    rows = []
    for value, estimates in swept:
        for est in estimates:
            rows.append([value, est.policy, est.mean, est.stderr])
    k = cfg.env.k
    sigma = math.sqrt(cfg.env.noise_var)
    for value, _ in swept:
        tau_eff = infometrics.rice_effective_horizon(value)
        h = infometrics.effective_horizon_bound(
            tau_eff, math.log(k - 1), math.log(k), cfg.T
        )
        rows.append([value, "ts_upper_bound", infometrics.regret_bound_karmed(sigma, k, h), None])
    return FigureData(figure_id, ["tau_id", "series", "value", "stderr"], rows)
