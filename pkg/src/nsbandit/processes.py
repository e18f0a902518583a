"""Latent-state stochastic process generators.

Stationary squared-exponential Gaussian processes, the uniform-restart
switching Markov chain, the stationary renewal changepoint construction used
by the lower-bound environment, and the article-pool refresh process.

All generators are reproducible: the same Generator state yields the same
path.  Parallel path sampling should give each path its own Generator seeded
from a counter (see the harness module).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .gaussian import NotPositiveDefinite, cholesky_with_info

__all__ = [
    "SEKernel",
    "se_cov",
    "se_cov_matrix",
    "sample_gp_path",
    "gp_path_jitter",
    "MarkovSwitchSpec",
    "sample_markov_switch_path",
    "RenewalSpec",
    "sample_renewal_changepoints",
    "BetaPrior",
    "PointMassPrior",
    "ArticlePoolSpec",
    "sample_article_pool",
]

#: Base jitter for GP prior factorizations that fail without regularization.
#: Escalates 1e-10 -> 1e-9 -> 1e-8 (SE Gram matrices are near-singular for
#: long timescales).
GP_BASE_JITTER = 1e-10


@dataclass(frozen=True)
class SEKernel:
    """Squared-exponential kernel: variance * exp(-((s-t)/timescale)^2 / 2)."""

    variance: float
    timescale: float

    def __post_init__(self):
        if not (self.variance > 0 and math.isfinite(self.variance)):
            raise ValueError(f"kernel variance must be finite and > 0, got {self.variance}")
        if not (self.timescale > 0 and math.isfinite(self.timescale)):
            raise ValueError(f"kernel timescale must be finite and > 0, got {self.timescale}")

    def lag_cov(self, d):
        """Covariance at integer lag(s) ``d`` (vectorized)."""
        d = np.asarray(d, dtype=float)
        return self.variance * np.exp(-0.5 * (d / self.timescale) ** 2)


def se_cov(s: int, t: int, kern: SEKernel) -> float:
    """Covariance between periods ``s`` and ``t`` under ``kern``."""
    if s < 1 or t < 1:
        raise ValueError("period indices are 1-based")
    return float(kern.lag_cov(s - t))


def se_cov_matrix(kern: SEKernel, T: int) -> np.ndarray:
    """Gram matrix of ``kern`` over periods 1..T."""
    idx = np.arange(T, dtype=float)
    return kern.lag_cov(idx[:, None] - idx[None, :])


@lru_cache(maxsize=8)
def _gp_factor(variance: float, timescale: float, T: int) -> tuple[np.ndarray, float]:
    """Cached Cholesky factor of the T x T SE Gram matrix (read-only array)."""
    k = se_cov_matrix(SEKernel(variance, timescale), T)
    try:
        chol, used = cholesky_with_info(k, 0.0)
    except NotPositiveDefinite:
        chol, used = cholesky_with_info(k, GP_BASE_JITTER)
    chol.setflags(write=False)
    return chol, used


def sample_gp_path(kern: SEKernel, T: int, rng: np.random.Generator) -> np.ndarray:
    """One sample path of length T from the zero-mean GP with kernel ``kern``.

    A single batch Cholesky of the T x T Gram matrix is cached per
    (kernel, T), so repeated sampling costs one matrix-vector product.
    """
    if T < 1:
        raise ValueError(f"T must be >= 1, got {T}")
    chol, _ = _gp_factor(kern.variance, kern.timescale, T)
    return chol @ rng.standard_normal(T)


def gp_path_jitter(kern: SEKernel, T: int) -> float:
    """Jitter that the cached factorization for (kern, T) needed; 0 if none."""
    return _gp_factor(kern.variance, kern.timescale, T)[1]


@dataclass(frozen=True)
class MarkovSwitchSpec:
    """Uniform-restart switching chain: stay w.p. 1-delta, else jump uniformly
    to one of the other k-1 arms."""

    k: int
    delta: float

    def __post_init__(self):
        if self.k < 2:
            raise ValueError(f"k must be >= 2, got {self.k}")
        if not (0.0 <= self.delta <= 1.0):
            raise ValueError(f"delta must be in [0, 1], got {self.delta}")


def sample_markov_switch_path(spec: MarkovSwitchSpec, T: int, rng: np.random.Generator) -> np.ndarray:
    """Length-T arm sequence (0-based) from the switching chain.

    The initial arm is uniform on the k arms, which is the chain's stationary
    distribution, so the sequence is stationary.
    """
    if T < 1:
        raise ValueError(f"T must be >= 1, got {T}")
    path = np.empty(T, dtype=np.int64)
    path[0] = rng.integers(spec.k)
    if T == 1:
        return path
    switch = rng.random(T - 1) < spec.delta
    # jump target: uniform over the k-1 arms other than the current one
    jump = rng.integers(0, spec.k - 1, size=T - 1)
    cur = int(path[0])
    pos = 0
    for t in np.flatnonzero(switch):
        path[pos : t + 1] = cur
        j = int(jump[t])
        cur = j + 1 if j >= cur else j
        pos = t + 1
    path[pos:] = cur
    return path


@dataclass(frozen=True)
class RenewalSpec:
    """Renewal-changepoint construction targeting a given effective horizon.

    Blocks have i.i.d. lengths with mean tilde_tau = (k-1)/k * tau_eff; a
    uniform best arm is redrawn at each changepoint, so the best arm actually
    changes with probability (1-1/k)/tilde_tau = 1/tau_eff per period.  The
    per-block reward gap is epsilon = (1-1/k)*sqrt(k/n).
    """

    k: int
    tau_eff: float

    def __post_init__(self):
        if self.k < 2:
            raise ValueError(f"k must be >= 2, got {self.k}")
        if self.tau_eff < self.k:
            raise ValueError(f"tau_eff must be >= k, got {self.tau_eff}")
        if self.n_floor < 1:
            raise ValueError("derived block length floor must be >= 1")

    @property
    def tilde_tau(self) -> float:
        return (self.k - 1) / self.k * self.tau_eff

    @property
    def n_floor(self) -> int:
        return int(math.floor(self.tilde_tau))

    @property
    def p_frac(self) -> float:
        return self.tilde_tau - self.n_floor

    @property
    def epsilon(self) -> float:
        return (1.0 - 1.0 / self.k) * math.sqrt(self.k / self.n_floor)


def sample_renewal_changepoints(
    spec: RenewalSpec, T: int, rng: np.random.Generator
) -> tuple[list[int], list[int]]:
    """Changepoint times and per-block best arms over horizon T.

    The first changepoint T1 is drawn from the equilibrium excess-life law
    P(T1=x) = 1/tilde_tau for x <= n and p/tilde_tau for x = n+1, making the
    renewal process stationary; later gaps are i.i.d. n w.p. 1-p and n+1
    w.p. p so their mean is exactly tilde_tau.

    Returns:
        (changepoints, block_arms): 1-based changepoint times within [1, T],
        and the best arm (0-based) of each block under the closed-open
        convention [T_j, T_{j+1}); block_arms[0] covers periods before the
        first changepoint and has length len(changepoints)+1.
    """
    if T < 1:
        raise ValueError(f"T must be >= 1, got {T}")
    n, p, ttau = spec.n_floor, spec.p_frac, spec.tilde_tau
    u = rng.random() * ttau
    t1 = int(u) + 1 if u < n else n + 1
    changepoints: list[int] = []
    t_next = t1
    while t_next <= T:
        changepoints.append(t_next)
        t_next += n + (1 if rng.random() < p else 0)
    block_arms = [int(a) for a in rng.integers(0, spec.k, size=len(changepoints) + 1)]
    return changepoints, block_arms


@dataclass(frozen=True)
class BetaPrior:
    """Beta(alpha, beta) distribution over click-through rates."""

    alpha: float = 1.0
    beta: float = 1.0

    def __post_init__(self):
        if self.alpha <= 0 or self.beta <= 0:
            raise ValueError("Beta parameters must be > 0")

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        return rng.beta(self.alpha, self.beta, size=size)


@dataclass(frozen=True)
class PointMassPrior:
    """Degenerate prior: every fresh article has the same click-through rate."""

    value: float

    def __post_init__(self):
        if not (0.0 <= self.value <= 1.0):
            raise ValueError(f"point mass must lie in [0, 1], got {self.value}")

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        return np.full(size, self.value)


@dataclass(frozen=True)
class ArticlePoolSpec:
    """k article slots refreshed independently with probability 1/tau per
    period; fresh click-through rates are i.i.d. from ``ctr_prior``."""

    k: int
    tau: float
    ctr_prior: BetaPrior | PointMassPrior = field(default_factory=BetaPrior)

    def __post_init__(self):
        if self.k < 2:
            raise ValueError(f"k must be >= 2, got {self.k}")
        if not self.tau >= 1:
            raise ValueError(f"tau must be >= 1, got {self.tau}")


def sample_article_pool(
    spec: ArticlePoolSpec, T: int, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Sample the (T, k) click-through-rate matrix and refresh indicators.

    chi[t, a] = 1 means slot a is refreshed between periods t+1 and t+2
    (1-based: between t and t+1), so theta is carried forward where chi = 0
    and redrawn from the prior where chi = 1.  tau = inf gives no refreshes.
    """
    if T < 1:
        raise ValueError(f"T must be >= 1, got {T}")
    refresh_p = 0.0 if math.isinf(spec.tau) else 1.0 / spec.tau
    theta0 = spec.ctr_prior.sample(rng, spec.k)
    chi = (rng.random((T, spec.k)) < refresh_p).astype(np.int8)
    fresh = spec.ctr_prior.sample(rng, (T, spec.k))
    theta = np.empty((T, spec.k))
    theta[0] = theta0
    for t in range(1, T):
        refreshed = chi[t - 1] == 1
        theta[t] = np.where(refreshed, fresh[t], theta[t - 1])
    return theta, chi
