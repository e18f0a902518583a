"""Playable bandit environments.

Assembles latent processes into realized mean-reward paths (a LatentPath),
draws noisy rewards on demand, and scores action sequences by per-period
regret against the optimal action sequence or a satisficing benchmark.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy.signal import lfilter

from .processes import (
    ArticlePoolSpec,
    BetaPrior,
    MarkovSwitchSpec,
    PointMassPrior,
    RenewalSpec,
    SEKernel,
    sample_article_pool,
    sample_gp_path,
    sample_markov_switch_path,
    sample_renewal_changepoints,
)

__all__ = [
    "LatentPath",
    "GaussianNoise",
    "BernoulliRewards",
    "RewardModel",
    "GPTwoType",
    "AR1Env",
    "MarkovSwitchEnv",
    "RenewalLBEnv",
    "ArticlePoolEnv",
    "FixedPlusGPEnv",
    "EnvSpec",
    "realize",
    "default_reward_model",
    "draw_reward",
    "regret_of_sequence",
    "satisficing_regret_of_sequence",
    "path_to_csv",
    "path_from_csv",
    "env_to_dict",
    "env_from_dict",
]


@dataclass
class LatentPath:
    """Realized mean-reward matrix plus the optimal action sequence.

    Attributes:
        T: horizon.
        k: number of arms.
        mu: (T, k) conditional mean rewards E[R_{t,a} | latent state].
        opt: length-T optimal arm indices (0-based), argmax with
            lowest-index tie-break.
        meta: environment-specific extras (refresh indicators, fixed means,
            changepoints, latent components).
    """

    T: int
    k: int
    mu: np.ndarray
    opt: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.mu.shape != (self.T, self.k):
            raise ValueError(f"mu has shape {self.mu.shape}, expected {(self.T, self.k)}")
        if self.opt.shape != (self.T,):
            raise ValueError("opt length must equal T")
        if not np.array_equal(self.opt, np.argmax(self.mu, axis=1)):
            raise ValueError("opt must be the lowest-index argmax of each mu row")


@dataclass(frozen=True)
class GaussianNoise:
    """Additive N(0, sigma_sq) reward noise."""

    sigma_sq: float

    def __post_init__(self):
        if self.sigma_sq <= 0:
            raise ValueError(f"sigma_sq must be > 0, got {self.sigma_sq}")


@dataclass(frozen=True)
class BernoulliRewards:
    """Bernoulli(mu) rewards; requires mean rewards in [0, 1]."""


RewardModel = Union[GaussianNoise, BernoulliRewards]


@dataclass(frozen=True)
class GPTwoType:
    """Common-plus-idiosyncratic GP environment.

    Each arm's mean reward is theta_cm[t] + theta_id[t, a], where the common
    path and the per-arm idiosyncratic paths are independent unit-variance
    SE-kernel GPs with timescales tau_cm and tau_id.  Only the idiosyncratic
    parts move the optimal arm.
    """

    k: int = 2
    tau_cm: float = 10.0
    tau_id: float = 50.0
    noise_var: float = 1.0

    def __post_init__(self):
        if self.k < 2:
            raise ValueError(f"k must be >= 2, got {self.k}")
        if self.tau_cm <= 0 or self.tau_id <= 0:
            raise ValueError("timescales must be > 0")
        if self.noise_var <= 0:
            raise ValueError("noise_var must be > 0")


@dataclass(frozen=True)
class AR1Env:
    """Independent per-arm AR(1) mean-reward processes with Gaussian noise."""

    k: int
    alpha: float
    sigma_xi_sq: float
    sigma_w_sq: float

    def __post_init__(self):
        if self.k < 2:
            raise ValueError(f"k must be >= 2, got {self.k}")
        if not (0.0 <= self.alpha < 1.0):
            raise ValueError(f"alpha must be in [0, 1), got {self.alpha}")
        if self.sigma_xi_sq < 0 or self.sigma_w_sq <= 0:
            raise ValueError("sigma_xi_sq must be >= 0 and sigma_w_sq > 0")

    @property
    def stationary_var(self) -> float:
        return self.sigma_xi_sq / (1.0 - self.alpha * self.alpha)


@dataclass(frozen=True)
class MarkovSwitchEnv:
    """Best arm follows the switching chain; it pays ``gap``, the rest pay 0."""

    spec: MarkovSwitchSpec
    gap: float = 1.0
    noise_var: float = 1.0

    def __post_init__(self):
        if self.gap <= 0:
            raise ValueError(f"gap must be > 0, got {self.gap}")
        if self.noise_var <= 0:
            raise ValueError("noise_var must be > 0")

    @property
    def k(self) -> int:
        return self.spec.k


@dataclass(frozen=True)
class RenewalLBEnv:
    """Block-constant lower-bound construction with unit reward noise."""

    spec: RenewalSpec

    @property
    def k(self) -> int:
        return self.spec.k


@dataclass(frozen=True)
class ArticlePoolEnv:
    """Article slots with geometric lifetimes and Bernoulli click rewards."""

    spec: ArticlePoolSpec

    @property
    def k(self) -> int:
        return self.spec.k


@dataclass(frozen=True)
class FixedPlusGPEnv:
    """Fixed arm quality plus a unit-variance GP disturbance per arm.

    mu[t, a] = mu_fixed[a] + gp[t, a] with mu_fixed[a] ~ N(0, v_sq) i.i.d.
    The fixed means are stored in path.meta["mu_fixed"] so the obscured-
    information benchmark argmax_a mu_fixed[a] is computable per path.
    """

    k: int
    v_sq: float
    tau: float
    noise_var: float

    def __post_init__(self):
        if self.k < 2:
            raise ValueError(f"k must be >= 2, got {self.k}")
        if self.v_sq <= 0 or self.tau <= 0 or self.noise_var <= 0:
            raise ValueError("v_sq, tau, noise_var must all be > 0")


EnvSpec = Union[GPTwoType, AR1Env, MarkovSwitchEnv, RenewalLBEnv, ArticlePoolEnv, FixedPlusGPEnv]


def realize(spec: EnvSpec, T: int, rng: np.random.Generator) -> LatentPath:
    """Draw one latent path of horizon T from the environment.

    The rng draw order is fixed per variant (idiosyncratic arm paths before
    the common path for GPTwoType) so that runs differing only in tau_cm
    share identical optimal-action sequences under a common seed.
    """
    if T < 1:
        raise ValueError(f"T must be >= 1, got {T}")
    if isinstance(spec, GPTwoType):
        id_kern = SEKernel(1.0, spec.tau_id)
        theta_id = np.column_stack([sample_gp_path(id_kern, T, rng) for _ in range(spec.k)])
        theta_cm = sample_gp_path(SEKernel(1.0, spec.tau_cm), T, rng)
        mu = theta_cm[:, None] + theta_id
        meta = {"theta_cm": theta_cm, "theta_id": theta_id}
    elif isinstance(spec, AR1Env):
        v = spec.stationary_var
        cols = []
        for _ in range(spec.k):
            x = np.empty(T)
            x[0] = math.sqrt(v) * rng.standard_normal() if v > 0 else 0.0
            if T > 1:
                x[1:] = math.sqrt(spec.sigma_xi_sq) * rng.standard_normal(T - 1)
            cols.append(lfilter([1.0], [1.0, -spec.alpha], x))
        mu = np.column_stack(cols)
        meta = {}
    elif isinstance(spec, MarkovSwitchEnv):
        best = sample_markov_switch_path(spec.spec, T, rng)
        mu = np.zeros((T, spec.k))
        mu[np.arange(T), best] = spec.gap
        meta = {}
    elif isinstance(spec, RenewalLBEnv):
        changepoints, block_arms = sample_renewal_changepoints(spec.spec, T, rng)
        best = np.empty(T, dtype=np.int64)
        bounds = [1] + changepoints + [T + 1]
        for j in range(len(bounds) - 1):
            best[bounds[j] - 1 : bounds[j + 1] - 1] = block_arms[j]
        mu = np.zeros((T, spec.k))
        mu[np.arange(T), best] = spec.spec.epsilon
        meta = {"changepoints": changepoints, "block_arms": block_arms}
    elif isinstance(spec, ArticlePoolEnv):
        theta, chi = sample_article_pool(spec.spec, T, rng)
        mu = theta
        meta = {"chi": chi}
    elif isinstance(spec, FixedPlusGPEnv):
        mu_fixed = math.sqrt(spec.v_sq) * rng.standard_normal(spec.k)
        kern = SEKernel(1.0, spec.tau)
        gp = np.column_stack([sample_gp_path(kern, T, rng) for _ in range(spec.k)])
        mu = mu_fixed[None, :] + gp
        meta = {"mu_fixed": mu_fixed}
    else:
        raise TypeError(f"unknown environment spec {type(spec).__name__}")
    opt = np.argmax(mu, axis=1)
    return LatentPath(T=T, k=spec.k, mu=mu, opt=opt, meta=meta)


def default_reward_model(spec: EnvSpec) -> RewardModel:
    """Reward model each environment family is played with."""
    if isinstance(spec, GPTwoType):
        return GaussianNoise(spec.noise_var)
    if isinstance(spec, AR1Env):
        return GaussianNoise(spec.sigma_w_sq)
    if isinstance(spec, MarkovSwitchEnv):
        return GaussianNoise(spec.noise_var)
    if isinstance(spec, RenewalLBEnv):
        return GaussianNoise(1.0)
    if isinstance(spec, ArticlePoolEnv):
        return BernoulliRewards()
    if isinstance(spec, FixedPlusGPEnv):
        return GaussianNoise(spec.noise_var)
    raise TypeError(f"unknown environment spec {type(spec).__name__}")


def draw_reward(path: LatentPath, model: RewardModel, t: int, a: int, rng: np.random.Generator) -> float:
    """Draw the period-t reward of arm ``a`` (0-based) on the realized path."""
    if not 1 <= t <= path.T:
        raise ValueError(f"period {t} outside 1..{path.T}")
    if not 0 <= a < path.k:
        raise ValueError(f"arm {a} outside 0..{path.k - 1}")
    m = float(path.mu[t - 1, a])
    if isinstance(model, GaussianNoise):
        return m + math.sqrt(model.sigma_sq) * rng.standard_normal()
    if isinstance(model, BernoulliRewards):
        if not 0.0 <= m <= 1.0:
            raise ValueError(f"Bernoulli rewards need mu in [0, 1], got {m} at (t={t}, a={a})")
        return float(rng.random() < m)
    raise TypeError(f"unknown reward model {type(model).__name__}")


def regret_of_sequence(path: LatentPath, actions) -> float:
    """Pathwise per-period regret of an action sequence against the optimum."""
    actions = np.asarray(actions, dtype=int)
    if actions.shape != (path.T,):
        raise ValueError(f"actions length {actions.shape} != horizon {path.T}")
    rows = np.arange(path.T)
    return float(np.mean(path.mu[rows, path.opt] - path.mu[rows, actions]))


def satisficing_regret_of_sequence(path: LatentPath, actions, benchmark) -> float:
    """Pathwise per-period regret relative to a benchmark sequence (may be < 0)."""
    actions = np.asarray(actions, dtype=int)
    benchmark = np.asarray(benchmark, dtype=int)
    if actions.shape != (path.T,) or benchmark.shape != (path.T,):
        raise ValueError("actions and benchmark must both have length T")
    rows = np.arange(path.T)
    return float(np.mean(path.mu[rows, benchmark] - path.mu[rows, actions]))


def path_to_csv(path: LatentPath, f) -> None:
    """Write a path as CSV with header t, mu_1..mu_k, opt (1-based labels)."""
    writer = csv.writer(f)
    writer.writerow(["t"] + [f"mu_{a + 1}" for a in range(path.k)] + ["opt"])
    for t in range(path.T):
        writer.writerow([t + 1] + [repr(float(x)) for x in path.mu[t]] + [int(path.opt[t]) + 1])


def path_from_csv(f) -> LatentPath:
    """Read a path written by :func:`path_to_csv`."""
    reader = csv.reader(f)
    header = next(reader)
    if header[0] != "t" or header[-1] != "opt":
        raise ValueError("unrecognized path CSV header")
    k = len(header) - 2
    mu_rows, opt_rows = [], []
    for row in reader:
        mu_rows.append([float(x) for x in row[1 : 1 + k]])
        opt_rows.append(int(row[-1]) - 1)
    mu = np.asarray(mu_rows)
    return LatentPath(T=mu.shape[0], k=k, mu=mu, opt=np.asarray(opt_rows, dtype=np.int64))


_ENV_TAGS = {
    GPTwoType: "gp_two_type",
    AR1Env: "ar1",
    MarkovSwitchEnv: "markov_switch",
    RenewalLBEnv: "renewal_lb",
    ArticlePoolEnv: "article_pool",
    FixedPlusGPEnv: "fixed_plus_gp",
}


def env_to_dict(spec: EnvSpec) -> dict:
    """JSON-ready dict form of an environment spec."""
    d: dict = {"type": _ENV_TAGS[type(spec)]}
    if isinstance(spec, GPTwoType):
        d.update(k=spec.k, tau_cm=spec.tau_cm, tau_id=spec.tau_id, noise_var=spec.noise_var)
    elif isinstance(spec, AR1Env):
        d.update(k=spec.k, alpha=spec.alpha, sigma_xi_sq=spec.sigma_xi_sq, sigma_w_sq=spec.sigma_w_sq)
    elif isinstance(spec, MarkovSwitchEnv):
        d.update(k=spec.k, delta=spec.spec.delta, gap=spec.gap, noise_var=spec.noise_var)
    elif isinstance(spec, RenewalLBEnv):
        d.update(k=spec.k, tau_eff=spec.spec.tau_eff)
    elif isinstance(spec, ArticlePoolEnv):
        d.update(k=spec.k, tau=spec.spec.tau)
        prior = spec.spec.ctr_prior
        if isinstance(prior, BetaPrior):
            d["ctr_prior"] = {"type": "beta", "alpha": prior.alpha, "beta": prior.beta}
        else:
            d["ctr_prior"] = {"type": "point", "value": prior.value}
    elif isinstance(spec, FixedPlusGPEnv):
        d.update(k=spec.k, v_sq=spec.v_sq, tau=spec.tau, noise_var=spec.noise_var)
    return d


def env_from_dict(d: dict) -> EnvSpec:
    """Parse an environment spec from its dict form; raises ValueError on bad input."""
    if not isinstance(d, dict) or "type" not in d:
        raise ValueError("environment config must be an object with a 'type' field")
    kind = d["type"]
    try:
        if kind == "gp_two_type":
            return GPTwoType(
                k=int(d.get("k", 2)),
                tau_cm=float(d["tau_cm"]),
                tau_id=float(d["tau_id"]),
                noise_var=float(d.get("noise_var", 1.0)),
            )
        if kind == "ar1":
            return AR1Env(
                k=int(d["k"]),
                alpha=float(d["alpha"]),
                sigma_xi_sq=float(d["sigma_xi_sq"]),
                sigma_w_sq=float(d["sigma_w_sq"]),
            )
        if kind == "markov_switch":
            return MarkovSwitchEnv(
                spec=MarkovSwitchSpec(k=int(d["k"]), delta=float(d["delta"])),
                gap=float(d.get("gap", 1.0)),
                noise_var=float(d.get("noise_var", 1.0)),
            )
        if kind == "renewal_lb":
            return RenewalLBEnv(spec=RenewalSpec(k=int(d["k"]), tau_eff=float(d["tau_eff"])))
        if kind == "article_pool":
            prior_d = d.get("ctr_prior", {"type": "beta", "alpha": 1.0, "beta": 1.0})
            if prior_d.get("type") == "point":
                prior = PointMassPrior(float(prior_d["value"]))
            elif prior_d.get("type") == "beta":
                prior = BetaPrior(float(prior_d.get("alpha", 1.0)), float(prior_d.get("beta", 1.0)))
            else:
                raise ValueError(f"unknown ctr_prior type {prior_d.get('type')!r}")
            return ArticlePoolEnv(spec=ArticlePoolSpec(k=int(d["k"]), tau=float(d["tau"]), ctr_prior=prior))
        if kind == "fixed_plus_gp":
            return FixedPlusGPEnv(
                k=int(d["k"]),
                v_sq=float(d["v_sq"]),
                tau=float(d["tau"]),
                noise_var=float(d["noise_var"]),
            )
    except KeyError as exc:
        raise ValueError(f"environment config for {kind!r} is missing field {exc}") from None
    raise ValueError(f"unknown environment type {kind!r}")
