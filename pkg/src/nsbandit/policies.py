"""Decision algorithms behind a single sequential act/observe interface.

Exact-posterior Thompson sampling for the common-plus-idiosyncratic GP model,
Kalman Thompson sampling for AR(1) arms, sliding-window TS and UCB baselines,
uniform play, and three satisficing variants (distortion-triggered switching,
switch-budget dynamic programming, and fixed-mean obscured information).

Policies see only their own action/reward history, never the latent path;
the oracle policy is the one deliberate exception and exists for harness
diagnostics.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np
from scipy.linalg import solve_triangular

from .envs import AR1Env, EnvSpec, FixedPlusGPEnv, GPTwoType, LatentPath
from .gaussian import (
    ConditionalGaussian,
    GaussianBelief,
    NotPositiveDefinite,
    cholesky,
    condition,
    kalman_diffuse,
    kalman_update,
    mvn_sample,
)
from .processes import SEKernel

__all__ = [
    "Policy",
    "UniformPolicy",
    "OraclePolicy",
    "sw_ts_belief",
    "sw_ucb_index",
    "SWTSPolicy",
    "SWUCBPolicy",
    "TSKalmanPolicy",
    "TSExactGPPolicy",
    "ts_exact_gp_posterior",
    "dp_best_sequence",
    "sts_distortion_target",
    "STSDistortionPolicy",
    "STSSwitchDPPolicy",
    "STSFixedMeanPolicy",
    "UniformSpec",
    "OracleSpec",
    "SWTSSpec",
    "SWUCBSpec",
    "TSKalmanSpec",
    "TSExactGPSpec",
    "STSDistortionSpec",
    "STSSwitchDPSpec",
    "STSFixedMeanSpec",
    "PolicySpec",
    "policy_from_dict",
    "policy_to_dict",
]

LagFn = Callable[[np.ndarray], np.ndarray]


class Policy:
    """Sequential protocol: act(t) then observe(t, arm, reward), t = 1, 2, ...

    ``act`` may be called repeatedly at the current period (it does not
    advance the clock); ``observe`` must be called exactly once per period,
    in order.
    """

    policy_id = "policy"

    def __init__(self, k: int):
        if k < 2:
            raise ValueError(f"k must be >= 2, got {k}")
        self.k = k
        self._next_t = 1

    def act(self, t: int, rng: np.random.Generator) -> int:
        self._require_period(t)
        return self._act(t, rng)

    def observe(self, t: int, arm: int, reward: float) -> None:
        self._require_period(t)
        if not 0 <= arm < self.k:
            raise ValueError(f"arm {arm} outside 0..{self.k - 1}")
        self._observe(t, arm, float(reward))
        self._next_t += 1

    def _require_period(self, t: int) -> None:
        if t != self._next_t:
            raise ValueError(f"out-of-order period {t}; expected {self._next_t}")

    def _act(self, t: int, rng: np.random.Generator) -> int:
        raise NotImplementedError

    def _observe(self, t: int, arm: int, reward: float) -> None:
        raise NotImplementedError


class UniformPolicy(Policy):
    """Plays an arm uniformly at random every period."""

    policy_id = "uniform"

    def _act(self, t, rng):
        return int(rng.integers(self.k))

    def _observe(self, t, arm, reward):
        pass


class OraclePolicy(Policy):
    """Plays the realized optimal arm; diagnostic only.

    This policy is handed the latent path by the harness and deliberately
    breaks the information barrier every other policy respects.
    """

    policy_id = "oracle"

    def __init__(self, k: int):
        super().__init__(k)
        self._path: Optional[LatentPath] = None

    def bind_path(self, path: LatentPath) -> None:
        self._path = path

    def _act(self, t, rng):
        if self._path is None:
            raise RuntimeError("oracle policy was not bound to a path")
        return int(self._path.opt[t - 1])

    def _observe(self, t, arm, reward):
        pass


def sw_ts_belief(window, arm: int) -> GaussianBelief:
    """Sliding-window posterior for one arm from the recent (arm, reward) records.

    mean = sum of the arm's windowed rewards / (1 + N), variance = 1 / (1 + N);
    the +1 pseudo-count is the unit-variance prior at zero.
    """
    total = 0.0
    n = 0
    for a, r in window:
        if a == arm:
            total += r
            n += 1
    return GaussianBelief(total / (1 + n), 1.0 / (1 + n))


def sw_ucb_index(window, arm: int, beta: float) -> float:
    """Sliding-window UCB index: windowed mean + beta / sqrt(N); +inf if N = 0."""
    if beta < 0:
        raise ValueError(f"beta must be >= 0, got {beta}")
    total = 0.0
    n = 0
    for a, r in window:
        if a == arm:
            total += r
            n += 1
    if n == 0:
        return math.inf
    return total / n + beta / math.sqrt(n)


class _WindowedPolicy(Policy):
    """Shared bookkeeping for the sliding-window baselines."""

    def __init__(self, k: int, L: int):
        super().__init__(k)
        if L < 1:
            raise ValueError(f"window length must be >= 1, got {L}")
        self.L = L
        self._window: deque = deque(maxlen=L)
        self._counts = np.zeros(k, dtype=np.int64)
        self._sums = np.zeros(k)

    def _observe(self, t, arm, reward):
        if len(self._window) == self.L:
            old_a, old_r = self._window[0]
            self._counts[old_a] -= 1
            self._sums[old_a] -= old_r
        self._window.append((arm, reward))
        self._counts[arm] += 1
        self._sums[arm] += reward


class SWTSPolicy(_WindowedPolicy):
    """Thompson sampling from the sliding-window mean/variance estimator."""

    def __init__(self, k: int, L: int):
        super().__init__(k, L)
        self.policy_id = f"sw_ts_L{L}"

    def _act(self, t, rng):
        denom = 1.0 + self._counts
        means = self._sums / denom
        draws = means + rng.standard_normal(self.k) / np.sqrt(denom)
        return int(np.argmax(draws))


class SWUCBPolicy(_WindowedPolicy):
    """Windowed UCB; untried-in-window arms get an infinite index and are
    played first, lowest index first."""

    def __init__(self, k: int, L: int, beta: float):
        super().__init__(k, L)
        if beta < 0:
            raise ValueError(f"beta must be >= 0, got {beta}")
        self.beta = beta
        self.policy_id = f"sw_ucb_L{L}_b{beta:g}"

    def _act(self, t, rng):
        idx = np.where(
            self._counts > 0,
            self._sums / np.maximum(self._counts, 1) + self.beta / np.sqrt(np.maximum(self._counts, 1)),
            np.inf,
        )
        return int(np.argmax(idx))


class TSKalmanPolicy(Policy):
    """Thompson sampling with per-arm scalar Kalman beliefs for AR(1) arms.

    Beliefs start at the stationary prior (0, sigma_xi^2 / (1 - alpha^2)).
    Each period every arm's belief is diffused one step; the played arm's
    belief additionally absorbs the new reward at precision 1/sigma_w^2.
    """

    policy_id = "ts_kalman"

    def __init__(self, k: int, alpha: float, sigma_xi_sq: float, sigma_w_sq: float):
        super().__init__(k)
        if not 0.0 <= alpha < 1.0:
            raise ValueError(f"alpha must be in [0, 1) for a stationary prior, got {alpha}")
        if sigma_xi_sq < 0 or sigma_w_sq <= 0:
            raise ValueError("need sigma_xi_sq >= 0 and sigma_w_sq > 0")
        self.alpha = alpha
        self.sigma_xi_sq = sigma_xi_sq
        self.sigma_w_sq = sigma_w_sq
        prior_var = sigma_xi_sq / (1.0 - alpha * alpha)
        self.beliefs = [GaussianBelief(0.0, prior_var) for _ in range(k)]

    def _act(self, t, rng):
        draws = np.empty(self.k)
        for a, b in enumerate(self.beliefs):
            d = kalman_diffuse(b, self.alpha, self.sigma_xi_sq)
            draws[a] = d.mean + math.sqrt(d.variance) * rng.standard_normal()
        return int(np.argmax(draws))

    def _observe(self, t, arm, reward):
        self.beliefs = [kalman_diffuse(b, self.alpha, self.sigma_xi_sq) for b in self.beliefs]
        self.beliefs[arm] = kalman_update(self.beliefs[arm], reward, self.sigma_w_sq)


class TSExactGPPolicy(Policy):
    """Exact-posterior Thompson sampling for arms with stationary Gaussian
    latent parts observed through white noise.

    Maintains an incremental Cholesky factor of the reward covariance: each
    observation appends one row (two triangular solves per period), and the
    per-period posterior over the arms' current idiosyncratic levels is
    recovered with one batched triangular solve.  Results match a full batch
    conditioning on the whole history.

    Args:
        k: number of arms.
        id_lag: idiosyncratic covariance as a function of |s - t| (vectorized).
        cm_lag: covariance of the common component, or None if absent.
        noise_var: reward noise variance.
        horizon: optional capacity hint for the internal buffers.
    """

    policy_id = "ts_exact"

    def __init__(
        self,
        k: int,
        id_lag: LagFn,
        cm_lag: Optional[LagFn],
        noise_var: float,
        horizon: Optional[int] = None,
    ):
        super().__init__(k)
        if noise_var <= 0:
            raise ValueError(f"noise_var must be > 0, got {noise_var}")
        self.id_lag = id_lag
        self.cm_lag = cm_lag
        self.noise_var = noise_var
        self._id0 = float(id_lag(np.zeros(1))[0])
        self._cm0 = float(cm_lag(np.zeros(1))[0]) if cm_lag is not None else 0.0
        cap = horizon if horizon is not None else 256
        self._L = np.zeros((cap, cap), order="F")
        self._v = np.zeros(cap)
        self._actions = np.zeros(cap, dtype=np.int64)
        self._n = 0
        self._cache_t = -1
        self._cache: tuple = ()

    @classmethod
    def from_gp_params(cls, params: GPTwoType, horizon: Optional[int] = None) -> "TSExactGPPolicy":
        id_k = SEKernel(1.0, params.tau_id)
        cm_k = SEKernel(1.0, params.tau_cm)
        return cls(params.k, id_k.lag_cov, cm_k.lag_cov, params.noise_var, horizon)

    def _grow(self):
        n, cap = self._n, self._L.shape[0] * 2
        new_l = np.zeros((cap, cap), order="F")
        new_l[:n, :n] = self._L[:n, :n]
        self._L = new_l
        new_v = np.zeros(cap)
        new_v[:n] = self._v[:n]
        self._v = new_v
        new_a = np.zeros(cap, dtype=np.int64)
        new_a[:n] = self._actions[:n]
        self._actions = new_a

    def _solve_block(self, t: int):
        """Triangular solves shared by act and observe at period t.

        Returns (W, u) with W = L^-1 B for the masked idiosyncratic columns
        and u = L^-1 (common covariance column), both against the first n
        rows of the history.
        """
        if self._cache_t == t:
            return self._cache
        n = self._n
        k = self.k
        ncols = k + (1 if self.cm_lag is not None else 0)
        lags = t - np.arange(1, n + 1, dtype=float)
        b = np.zeros((n, ncols), order="F")
        b[np.arange(n), self._actions[:n]] = self.id_lag(lags)
        if self.cm_lag is not None:
            b[:, k] = self.cm_lag(lags)
        sol = solve_triangular(self._L[:n, :n], b, lower=True, check_finite=False)
        w = sol[:, :k]
        u = sol[:, k] if self.cm_lag is not None else np.zeros(n)
        self._cache_t = t
        self._cache = (w, u)
        return w, u

    def posterior(self, t: int) -> ConditionalGaussian:
        """Posterior over the arms' idiosyncratic levels at period t given
        the first t-1 observations."""
        n = self._n
        if n == 0:
            return ConditionalGaussian(np.zeros(self.k), self._id0 * np.eye(self.k))
        w, _ = self._solve_block(t)
        mean = w.T @ self._v[:n]
        cov = self._id0 * np.eye(self.k) - w.T @ w
        cov = 0.5 * (cov + cov.T)
        return ConditionalGaussian(mean, cov)

    def _act(self, t, rng):
        post = self.posterior(t)
        draw = mvn_sample(post.mean, cholesky(post.cov, 1e-12), rng)
        return int(np.argmax(draw))

    def _observe(self, t, arm, reward):
        n = self._n
        if n == self._L.shape[0]:
            self._grow()
        if n == 0:
            row_sq = 0.0
            rv = reward
            l_row = None
        else:
            w, u = self._solve_block(t)
            l_row = u + w[:, arm]
            row_sq = float(l_row @ l_row)
            rv = reward - float(l_row @ self._v[:n])
        diag = self.noise_var + self._cm0 + self._id0
        pivot_sq = diag - row_sq
        if pivot_sq <= 0.0:
            raise NotPositiveDefinite(f"history covariance lost positive definiteness at t={t}")
        pivot = math.sqrt(pivot_sq)
        if l_row is not None:
            self._L[n, :n] = l_row
        self._L[n, n] = pivot
        self._v[n] = rv / pivot
        self._actions[n] = arm
        self._n = n + 1
        self._cache_t = -1


def ts_exact_gp_posterior(params: GPTwoType, history, t: Optional[int] = None) -> ConditionalGaussian:
    """Batch posterior over the arms' idiosyncratic levels at period t.

    Builds the joint Gaussian of past rewards and the queried levels -- the
    reward covariance has one noise, one common, and one same-arm
    idiosyncratic term -- then conditions on the realized rewards.

    Args:
        params: GP environment parameters (unit component variances).
        history: sequence of (arm, reward) pairs for periods 1..n.
        t: query period; defaults to n + 1.

    Returns:
        ConditionalGaussian over the k idiosyncratic levels at period t.
    """
    actions = np.asarray([a for a, _ in history], dtype=np.int64)
    rewards = np.asarray([r for _, r in history], dtype=float)
    n = actions.size
    if t is None:
        t = n + 1
    id_k = SEKernel(1.0, params.tau_id)
    cm_k = SEKernel(1.0, params.tau_cm)
    k = params.k
    times = np.arange(1, n + 1, dtype=float)
    joint = np.empty((n + k, n + k))
    same_arm = actions[:, None] == actions[None, :]
    lag = times[:, None] - times[None, :]
    joint[:n, :n] = cm_k.lag_cov(lag) + same_arm * id_k.lag_cov(lag) + params.noise_var * np.eye(n)
    cross = (actions[:, None] == np.arange(k)[None, :]) * id_k.lag_cov(times - t)[:, None]
    joint[:n, n:] = cross
    joint[n:, :n] = cross.T
    joint[n:, n:] = np.eye(k)
    return condition(np.zeros(n + k), joint, np.arange(n), rewards)


def dp_best_sequence(mu: np.ndarray, m: int) -> np.ndarray:
    """Best action sequence whose switch count (1 + changes) stays within m.

    Maximizes the summed per-period means by dynamic programming over
    (period, arm, switches used); ties broken by fewer switches, then by the
    lexicographically smallest sequence.  O(T k^2 m) time.
    """
    mu = np.asarray(mu, dtype=float)
    if mu.ndim != 2:
        raise ValueError("mu must be a (T, k) matrix")
    t_len, k = mu.shape
    if m < 1:
        raise ValueError(f"switch budget must be >= 1, got {m}")
    m = min(m, t_len)

    # value[a, s], extra switches and next-arm choice of the best suffix
    # starting at period t with arm a and s switches used so far
    value = np.full((t_len, k, m + 1), -np.inf)
    extra = np.zeros((t_len, k, m + 1), dtype=np.int64)
    choice = np.zeros((t_len, k, m + 1), dtype=np.int64)
    value[t_len - 1, :, 1:] = mu[t_len - 1][:, None]
    for t in range(t_len - 2, -1, -1):
        for s in range(1, m + 1):
            for a in range(k):
                best = (value[t + 1, a, s], extra[t + 1, a, s], a)
                if s < m:
                    for b in range(k):
                        if b == a:
                            continue
                        cand = (value[t + 1, b, s + 1], 1 + extra[t + 1, b, s + 1], b)
                        if cand[0] > best[0] or (
                            cand[0] == best[0] and (cand[1], cand[2]) < (best[1], best[2])
                        ):
                            best = cand
                value[t, a, s] = mu[t, a] + best[0]
                extra[t, a, s] = best[1]
                choice[t, a, s] = best[2]

    first = 0
    best = (value[0, 0, 1], extra[0, 0, 1])
    for a in range(1, k):
        cand = (value[0, a, 1], extra[0, a, 1])
        if cand[0] > best[0] or (cand[0] == best[0] and cand[1] < best[1]):
            best = cand
            first = a

    seq = np.empty(t_len, dtype=np.int64)
    seq[0] = first
    a, s = first, 1
    for t in range(t_len - 1):
        nxt = int(choice[t, a, s])
        if nxt != a:
            s += 1
        seq[t + 1] = nxt
        a = nxt
    return seq


def sts_distortion_target(mu: np.ndarray, D: float) -> np.ndarray:
    """Distortion-triggered benchmark sequence on a latent mean matrix.

    Starts at the first row's argmax and keeps the incumbent while its mean
    stays within D of the row maximum, switching to the row argmax otherwise
    (equality keeps the incumbent).  The sequence's per-period regret on the
    same matrix is at most D by construction.
    """
    if D < 0:
        raise ValueError(f"distortion level must be >= 0, got {D}")
    mu = np.asarray(mu, dtype=float)
    if mu.ndim != 2:
        raise ValueError("mu must be a (T, k) matrix")
    t_len = mu.shape[0]
    row_arg = np.argmax(mu, axis=1)
    row_max = mu[np.arange(t_len), row_arg]
    seq = np.empty(t_len, dtype=np.int64)
    seq[0] = row_arg[0]
    cur = int(seq[0])
    for s in range(1, t_len):
        if mu[s, cur] < row_max[s] - D:
            cur = int(row_arg[s])
        seq[s] = cur
    return seq


class _LatentGridSampler:
    """Joint posterior sampler for the arms' idiosyncratic paths given history.

    Samples the (periods x arms) grid of idiosyncratic levels jointly from
    their conditional law given past rewards.  The common component is left
    out of the sample: every consumer (argmax rules, switch-budget DP,
    distortion rule) is invariant to adding a shared per-period offset, so
    selection is unchanged while the sample stays smaller.
    """

    def __init__(self, k: int, id_lag: LagFn, cm_lag: Optional[LagFn], noise_var: float):
        self.k = k
        self.id_lag = id_lag
        self.cm_lag = cm_lag
        self.noise_var = noise_var
        self.actions: list[int] = []
        self.rewards: list[float] = []

    def observe(self, arm: int, reward: float) -> None:
        self.actions.append(arm)
        self.rewards.append(reward)

    def sample_grid(self, t_max: int, rng: np.random.Generator) -> np.ndarray:
        k = self.k
        periods = np.arange(1, t_max + 1, dtype=float)
        grid_times = np.repeat(periods, k)
        grid_arms = np.tile(np.arange(k), t_max)
        g = t_max * k
        gg = (grid_arms[:, None] == grid_arms[None, :]) * self.id_lag(
            grid_times[:, None] - grid_times[None, :]
        )
        n = len(self.actions)
        if n == 0:
            draw = mvn_sample(np.zeros(g), cholesky(gg, 1e-10), rng)
            return draw.reshape(t_max, k)
        actions = np.asarray(self.actions, dtype=np.int64)
        rewards = np.asarray(self.rewards, dtype=float)
        times = np.arange(1, n + 1, dtype=float)
        lag = times[:, None] - times[None, :]
        rr = (actions[:, None] == actions[None, :]) * self.id_lag(lag) + self.noise_var * np.eye(n)
        if self.cm_lag is not None:
            rr = rr + self.cm_lag(lag)
        gr = (grid_arms[None, :] == actions[:, None]) * self.id_lag(
            times[:, None] - grid_times[None, :]
        )
        joint = np.empty((n + g, n + g))
        joint[:n, :n] = rr
        joint[:n, n:] = gr
        joint[n:, :n] = gr.T
        joint[n:, n:] = gg
        post = condition(np.zeros(n + g), joint, np.arange(n), rewards)
        draw = mvn_sample(post.mean, cholesky(post.cov, 1e-10), rng)
        return draw.reshape(t_max, k)


class STSDistortionPolicy(Policy):
    """Satisficing TS that ignores suboptimality below a distortion level D.

    Each period resamples the joint latent prefix from its posterior, rebuilds
    the distortion-triggered benchmark on the sample, and plays its current
    entry.  Resampling the whole prefix every period costs O((k t)^3); this
    policy is meant for desk-scale horizons.
    """

    def __init__(
        self,
        k: int,
        D: float,
        id_lag: LagFn,
        cm_lag: Optional[LagFn],
        noise_var: float,
    ):
        super().__init__(k)
        if D < 0:
            raise ValueError(f"distortion level must be >= 0, got {D}")
        self.D = D
        self.policy_id = f"sts_D{D:g}"
        self._sampler = _LatentGridSampler(k, id_lag, cm_lag, noise_var)

    @classmethod
    def from_gp_params(cls, params: GPTwoType, D: float) -> "STSDistortionPolicy":
        return cls(
            params.k,
            D,
            SEKernel(1.0, params.tau_id).lag_cov,
            SEKernel(1.0, params.tau_cm).lag_cov,
            params.noise_var,
        )

    def _act(self, t, rng):
        grid = self._sampler.sample_grid(t, rng)
        return int(sts_distortion_target(grid, self.D)[t - 1])

    def _observe(self, t, arm, reward):
        self._sampler.observe(arm, reward)


class STSSwitchDPPolicy(Policy):
    """Satisficing TS against the best sequence with at most m switches.

    Each period samples the full-horizon latent grid from its posterior,
    solves the switch-constrained sequence problem on the sample by dynamic
    programming, and plays the sequence's current entry.  The lookahead
    horizon is an explicit parameter (the benchmark is defined for a fixed
    horizon).
    """

    def __init__(
        self,
        k: int,
        m: int,
        horizon: int,
        id_lag: LagFn,
        cm_lag: Optional[LagFn],
        noise_var: float,
    ):
        super().__init__(k)
        if m < 1:
            raise ValueError(f"switch budget must be >= 1, got {m}")
        if horizon < 1:
            raise ValueError(f"horizon must be >= 1, got {horizon}")
        self.m = m
        self.horizon = horizon
        self.policy_id = f"sts_m{m}"
        self._sampler = _LatentGridSampler(k, id_lag, cm_lag, noise_var)

    @classmethod
    def from_gp_params(cls, params: GPTwoType, m: int, horizon: int) -> "STSSwitchDPPolicy":
        return cls(
            params.k,
            m,
            horizon,
            SEKernel(1.0, params.tau_id).lag_cov,
            SEKernel(1.0, params.tau_cm).lag_cov,
            params.noise_var,
        )

    def _act(self, t, rng):
        if t > self.horizon:
            raise ValueError(f"period {t} beyond the policy's lookahead horizon {self.horizon}")
        grid = self._sampler.sample_grid(self.horizon, rng)
        return int(dp_best_sequence(grid, self.m)[t - 1])

    def _observe(self, t, arm, reward):
        self._sampler.observe(arm, reward)


class STSFixedMeanPolicy(Policy):
    """Satisficing TS that targets each arm's fixed mean, treating the GP
    disturbance as correlated noise.

    For the fixed-plus-GP reward model, the benchmark is the constant
    sequence argmax of the fixed means; probability matching only needs the
    per-arm posterior of the fixed mean, which concentrates over time, so
    exploration dies out instead of chasing the disturbance process.
    """

    policy_id = "sts_fixed"

    def __init__(self, k: int, v_sq: float, tau: float, noise_var: float):
        super().__init__(k)
        if v_sq <= 0 or tau <= 0 or noise_var <= 0:
            raise ValueError("v_sq, tau, noise_var must all be > 0")
        self.v_sq = v_sq
        self.noise_var = noise_var
        self._gp_lag = SEKernel(1.0, tau).lag_cov
        self._times: list[list[int]] = [[] for _ in range(k)]
        self._rewards: list[list[float]] = [[] for _ in range(k)]

    def fixed_mean_posterior(self, arm: int) -> GaussianBelief:
        """Posterior of the arm's fixed mean given its own observations."""
        times = np.asarray(self._times[arm], dtype=float)
        n = times.size
        if n == 0:
            return GaussianBelief(0.0, self.v_sq)
        y = np.asarray(self._rewards[arm], dtype=float)
        cov = self._gp_lag(times[:, None] - times[None, :]) + self.noise_var * np.eye(n)
        chol = cholesky(cov, 1e-12)
        a1 = solve_triangular(chol, np.ones(n), lower=True, check_finite=False)
        ay = solve_triangular(chol, y, lower=True, check_finite=False)
        prec = 1.0 / self.v_sq + float(a1 @ a1)
        return GaussianBelief(float(a1 @ ay) / prec, 1.0 / prec)

    def _act(self, t, rng):
        draws = np.empty(self.k)
        for a in range(self.k):
            post = self.fixed_mean_posterior(a)
            draws[a] = post.mean + math.sqrt(post.variance) * rng.standard_normal()
        return int(np.argmax(draws))

    def _observe(self, t, arm, reward):
        self._times[arm].append(t)
        self._rewards[arm].append(reward)


# ---------------------------------------------------------------------------
# Declarative policy specs (config-file constructible)


def _require_gp_params(params: Optional[GPTwoType], env: Optional[EnvSpec], who: str) -> GPTwoType:
    if params is not None:
        return params
    if isinstance(env, GPTwoType):
        return env
    raise ValueError(f"{who} needs GP environment knowledge; set params or use a gp_two_type env")


@dataclass(frozen=True)
class UniformSpec:
    @property
    def policy_id(self) -> str:
        return "uniform"

    def build(self, env: EnvSpec, T: int) -> Policy:
        return UniformPolicy(env.k)


@dataclass(frozen=True)
class OracleSpec:
    @property
    def policy_id(self) -> str:
        return "oracle"

    def build(self, env: EnvSpec, T: int) -> Policy:
        return OraclePolicy(env.k)


@dataclass(frozen=True)
class SWTSSpec:
    L: int

    @property
    def policy_id(self) -> str:
        return f"sw_ts_L{self.L}"

    def build(self, env: EnvSpec, T: int) -> Policy:
        return SWTSPolicy(env.k, self.L)


@dataclass(frozen=True)
class SWUCBSpec:
    L: int
    beta: float

    @property
    def policy_id(self) -> str:
        return f"sw_ucb_L{self.L}_b{self.beta:g}"

    def build(self, env: EnvSpec, T: int) -> Policy:
        return SWUCBPolicy(env.k, self.L, self.beta)


@dataclass(frozen=True)
class TSKalmanSpec:
    """Kalman TS parameters; unset fields inherit from an AR(1) environment."""

    alpha: Optional[float] = None
    sigma_xi_sq: Optional[float] = None
    sigma_w_sq: Optional[float] = None

    @property
    def policy_id(self) -> str:
        return "ts_kalman"

    def build(self, env: EnvSpec, T: int) -> Policy:
        alpha, xi, w = self.alpha, self.sigma_xi_sq, self.sigma_w_sq
        if alpha is None or xi is None or w is None:
            if not isinstance(env, AR1Env):
                raise ValueError("ts_kalman without explicit parameters requires an ar1 env")
            alpha = env.alpha if alpha is None else alpha
            xi = env.sigma_xi_sq if xi is None else xi
            w = env.sigma_w_sq if w is None else w
        return TSKalmanPolicy(env.k, alpha, xi, w)


@dataclass(frozen=True)
class TSExactGPSpec:
    params: Optional[GPTwoType] = None

    @property
    def policy_id(self) -> str:
        return "ts_exact"

    def build(self, env: EnvSpec, T: int) -> Policy:
        return TSExactGPPolicy.from_gp_params(_require_gp_params(self.params, env, "ts_exact"), T)


@dataclass(frozen=True)
class STSDistortionSpec:
    D: float
    params: Optional[GPTwoType] = None

    @property
    def policy_id(self) -> str:
        return f"sts_D{self.D:g}"

    def build(self, env: EnvSpec, T: int) -> Policy:
        return STSDistortionPolicy.from_gp_params(
            _require_gp_params(self.params, env, self.policy_id), self.D
        )


@dataclass(frozen=True)
class STSSwitchDPSpec:
    m: int
    params: Optional[GPTwoType] = None

    @property
    def policy_id(self) -> str:
        return f"sts_m{self.m}"

    def build(self, env: EnvSpec, T: int) -> Policy:
        return STSSwitchDPPolicy.from_gp_params(
            _require_gp_params(self.params, env, self.policy_id), self.m, T
        )


@dataclass(frozen=True)
class STSFixedMeanSpec:
    """Fixed-mean satisficing TS; unset fields inherit from a fixed_plus_gp env."""

    v_sq: Optional[float] = None
    tau: Optional[float] = None
    noise_var: Optional[float] = None

    @property
    def policy_id(self) -> str:
        return "sts_fixed"

    def build(self, env: EnvSpec, T: int) -> Policy:
        v, tau, nv = self.v_sq, self.tau, self.noise_var
        if v is None or tau is None or nv is None:
            if not isinstance(env, FixedPlusGPEnv):
                raise ValueError("sts_fixed without explicit parameters requires a fixed_plus_gp env")
            v = env.v_sq if v is None else v
            tau = env.tau if tau is None else tau
            nv = env.noise_var if nv is None else nv
        return STSFixedMeanPolicy(env.k, v, tau, nv)


PolicySpec = Union[
    UniformSpec,
    OracleSpec,
    SWTSSpec,
    SWUCBSpec,
    TSKalmanSpec,
    TSExactGPSpec,
    STSDistortionSpec,
    STSSwitchDPSpec,
    STSFixedMeanSpec,
]


def policy_from_dict(d: dict) -> PolicySpec:
    """Parse a policy spec from config; raises ValueError on bad input."""
    if not isinstance(d, dict) or "type" not in d:
        raise ValueError("policy config must be an object with a 'type' field")
    kind = d["type"]
    try:
        if kind == "uniform":
            return UniformSpec()
        if kind == "oracle":
            return OracleSpec()
        if kind == "sw_ts":
            return SWTSSpec(L=int(d["L"]))
        if kind == "sw_ucb":
            return SWUCBSpec(L=int(d["L"]), beta=float(d["beta"]))
        if kind == "ts_kalman":
            return TSKalmanSpec(
                alpha=None if d.get("alpha") is None else float(d["alpha"]),
                sigma_xi_sq=None if d.get("sigma_xi_sq") is None else float(d["sigma_xi_sq"]),
                sigma_w_sq=None if d.get("sigma_w_sq") is None else float(d["sigma_w_sq"]),
            )
        if kind == "ts_exact":
            return TSExactGPSpec(params=_gp_params_from(d))
        if kind == "sts_distortion":
            return STSDistortionSpec(D=float(d["D"]), params=_gp_params_from(d))
        if kind == "sts_switch_dp":
            return STSSwitchDPSpec(m=int(d["m"]), params=_gp_params_from(d))
        if kind == "sts_fixed_mean":
            return STSFixedMeanSpec(
                v_sq=None if d.get("v_sq") is None else float(d["v_sq"]),
                tau=None if d.get("tau") is None else float(d["tau"]),
                noise_var=None if d.get("noise_var") is None else float(d["noise_var"]),
            )
    except KeyError as exc:
        raise ValueError(f"policy config for {kind!r} is missing field {exc}") from None
    raise ValueError(f"unknown policy type {kind!r}")


def _gp_params_from(d: dict) -> Optional[GPTwoType]:
    if "params" not in d or d["params"] is None:
        return None
    p = d["params"]
    return GPTwoType(
        k=int(p.get("k", 2)),
        tau_cm=float(p["tau_cm"]),
        tau_id=float(p["tau_id"]),
        noise_var=float(p.get("noise_var", 1.0)),
    )


def policy_to_dict(spec: PolicySpec) -> dict:
    """JSON-ready dict form of a policy spec (round-trips policy_from_dict)."""
    def gp(p: Optional[GPTwoType]):
        if p is None:
            return None
        return {"k": p.k, "tau_cm": p.tau_cm, "tau_id": p.tau_id, "noise_var": p.noise_var}

    if isinstance(spec, UniformSpec):
        return {"type": "uniform"}
    if isinstance(spec, OracleSpec):
        return {"type": "oracle"}
    if isinstance(spec, SWTSSpec):
        return {"type": "sw_ts", "L": spec.L}
    if isinstance(spec, SWUCBSpec):
        return {"type": "sw_ucb", "L": spec.L, "beta": spec.beta}
    if isinstance(spec, TSKalmanSpec):
        return {
            "type": "ts_kalman",
            "alpha": spec.alpha,
            "sigma_xi_sq": spec.sigma_xi_sq,
            "sigma_w_sq": spec.sigma_w_sq,
        }
    if isinstance(spec, TSExactGPSpec):
        return {"type": "ts_exact", "params": gp(spec.params)}
    if isinstance(spec, STSDistortionSpec):
        return {"type": "sts_distortion", "D": spec.D, "params": gp(spec.params)}
    if isinstance(spec, STSSwitchDPSpec):
        return {"type": "sts_switch_dp", "m": spec.m, "params": gp(spec.params)}
    if isinstance(spec, STSFixedMeanSpec):
        return {
            "type": "sts_fixed_mean",
            "v_sq": spec.v_sq,
            "tau": spec.tau,
            "noise_var": spec.noise_var,
        }
    raise TypeError(f"unknown policy spec {type(spec).__name__}")
