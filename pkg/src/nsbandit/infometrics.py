"""Information-theoretic quantities and computable regret bounds.

Switch rates, entropy rates of the optimal-action process (closed form for
the switching chain, plug-in from sampled paths, brute force from an explicit
path law), effective-horizon and switching-rate entropy bounds, the k-armed
and full-information regret bounds, the variation budget, and the
rate-distortion style bounds for slowly drifting environments.

All entropies are in nats per period.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "EntropyEstimate",
    "BoundReport",
    "switch_rate",
    "entropy_rate_markov_switch",
    "markov_switch_path_law",
    "markov_switch_expected_switch_rate",
    "entropy_rate_plugin",
    "entropy_rate_bruteforce",
    "combinatorial_entropy_bound",
    "effective_horizon_bound",
    "rice_effective_horizon",
    "news_effective_horizon",
    "regret_bound_karmed",
    "regret_bound_fullinfo",
    "variation_budget",
    "rate_distortion_bound",
    "regret_bound_variation",
    "regret_bound_sts",
    "INFO_RATIO_SETTINGS",
    "info_ratio_bound",
]


@dataclass(frozen=True)
class EntropyEstimate:
    """Entropy-rate estimate with its estimation method.

    ``order`` and ``stderr`` are populated by the plug-in estimator only;
    ``low_count_warning`` flags fewer than 10 transitions per observed
    context on average.
    """

    value: float
    method: str
    order: int | None = None
    stderr: float | None = None
    low_count_warning: bool = False


@dataclass(frozen=True)
class BoundReport:
    """Named bound value plus the inputs it was evaluated at."""

    name: str
    value: float
    inputs: dict = field(default_factory=dict)


def _xlogx(p: float) -> float:
    # 0 * log 0 := 0
    return p * math.log(p) if p > 0 else 0.0


def switch_rate(seq) -> float:
    """Switching rate (1 + number of changes) / T of an action sequence."""
    seq = np.asarray(seq)
    if seq.size == 0:
        raise ValueError("sequence must be nonempty")
    changes = int(np.count_nonzero(seq[1:] != seq[:-1]))
    return (1 + changes) / seq.size


def entropy_rate_markov_switch(k: int, delta: float) -> float:
    """Closed-form entropy rate of the uniform-restart switching chain.

    (1-delta) log(1/(1-delta)) + delta log((k-1)/delta), 0 log 0 := 0.
    """
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    if not 0.0 <= delta <= 1.0:
        raise ValueError(f"delta must be in [0, 1], got {delta}")
    return -_xlogx(1.0 - delta) + (delta * math.log((k - 1) / delta) if delta > 0 else 0.0)


def markov_switch_expected_switch_rate(k: int, delta: float, T: int) -> float:
    """Exact expected switching rate (1 + (T-1) delta) / T of the chain."""
    if T < 1:
        raise ValueError(f"T must be >= 1, got {T}")
    if k < 2 or not 0.0 <= delta <= 1.0:
        raise ValueError("need k >= 2 and delta in [0, 1]")
    return (1.0 + (T - 1) * delta) / T


def markov_switch_path_law(k: int, delta: float, T: int, max_states: int = 2_000_000) -> np.ndarray:
    """Explicit probabilities of all k^T arm sequences of the switching chain.

    Returned as a flat array of length k^T (C order, last symbol fastest);
    the ordering is irrelevant for entropy computations.
    """
    if k < 2 or T < 1:
        raise ValueError("need k >= 2 and T >= 1")
    if k**T > max_states:
        raise ValueError(f"k^T = {k**T} sequences exceed the enumeration cap {max_states}")
    trans = np.full((k, k), delta / (k - 1))
    np.fill_diagonal(trans, 1.0 - delta)
    p = np.full(k, 1.0 / k)
    for _ in range(T - 1):
        p = (p.reshape(-1, k)[:, :, None] * trans[None, :, :]).reshape(-1)
    return p


def entropy_rate_bruteforce(path_probs, T: int) -> float:
    """Entropy rate H(X_{1:T}) / T from an explicit path distribution.

    Args:
        path_probs: probabilities of every possible length-T realization
            (any order); must sum to 1 within 1e-9.
        T: sequence length.
    """
    if T < 1:
        raise ValueError(f"T must be >= 1, got {T}")
    p = np.asarray(path_probs, dtype=float)
    if np.any(p < 0):
        raise ValueError("probabilities must be nonnegative")
    if abs(float(p.sum()) - 1.0) > 1e-9:
        raise ValueError(f"unnormalized distribution: sums to {p.sum()!r}")
    nz = p[p > 0]
    return float(-(nz * np.log(nz)).sum()) / T


def _plugin_from_counts(counts: np.ndarray) -> float:
    """Conditional entropy from a (contexts, symbols) count matrix."""
    n = counts.sum()
    if n == 0:
        return 0.0
    ctx_tot = counts.sum(axis=1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        logratio = np.where(counts > 0, np.log(counts / ctx_tot), 0.0)
    return float(-(counts * logratio).sum() / n)


def entropy_rate_plugin(
    paths,
    order: int = 1,
    n_boot: int = 200,
    rng: np.random.Generator | None = None,
) -> EntropyEstimate:
    """Plug-in conditional entropy H(X_t | X_{t-1..t-order}) from sampled paths.

    Transition counts are pooled across paths and periods with no smoothing;
    the stderr is a bootstrap over paths.  Estimates are exact for the rate
    of order-``order`` Markov processes as data grows; for longer-memory
    processes they are an approximation (the harness labels these).

    Args:
        paths: (S, T) integer array of sampled action sequences (0-based).
        order: Markov order of the conditioning context (>= 0).
        n_boot: bootstrap resamples for the stderr (0 disables).
        rng: generator for the bootstrap; a fixed default keeps results
            deterministic.

    Returns:
        EntropyEstimate with method "plugin_markov_order_<order>".
    """
    paths = np.asarray(paths, dtype=np.int64)
    if paths.ndim == 1:
        paths = paths[None, :]
    s_paths, t_len = paths.shape
    if s_paths < 1 or t_len < order + 1:
        raise ValueError("need at least one path longer than the Markov order")
    if order < 0:
        raise ValueError(f"order must be >= 0, got {order}")
    k = int(paths.max()) + 1

    n_ctx = k**order
    per_path = np.zeros((s_paths, n_ctx * k), dtype=np.int64)
    for s in range(s_paths):
        x = paths[s]
        ctx = np.zeros(t_len - order, dtype=np.int64)
        for j in range(1, order + 1):
            ctx = ctx * k + x[order - j : t_len - j]
        codes = ctx * k + x[order:]
        per_path[s] = np.bincount(codes, minlength=n_ctx * k)

    pooled = per_path.sum(axis=0).reshape(n_ctx, k)
    value = _plugin_from_counts(pooled)

    observed_ctx = int(np.count_nonzero(pooled.sum(axis=1)))
    low_count = pooled.sum() / max(observed_ctx, 1) < 10

    stderr = None
    if n_boot > 0 and s_paths > 1:
        if rng is None:
            rng = np.random.default_rng(0)
        draws = np.empty(n_boot)
        for b in range(n_boot):
            pick = rng.integers(0, s_paths, size=s_paths)
            draws[b] = _plugin_from_counts(per_path[pick].sum(axis=0).reshape(n_ctx, k))
        stderr = float(np.std(draws, ddof=1))

    return EntropyEstimate(
        value=value,
        method=f"plugin_markov_order_{order}",
        order=order,
        stderr=stderr,
        low_count_warning=bool(low_count),
    )


def combinatorial_entropy_bound(s_bar: float, T: int, k: int) -> float:
    """Switching-rate entropy bound s_bar (1 + log(1 + 1/s_bar) + log k) + log(T)/T."""
    if not 0.0 < s_bar <= 1.0:
        raise ValueError(f"expected 0 < s_bar <= 1, got {s_bar}")
    if T < 1 or k < 2:
        raise ValueError("need T >= 1 and k >= 2")
    return s_bar * (1.0 + math.log(1.0 + 1.0 / s_bar) + math.log(k)) + math.log(T) / T


def effective_horizon_bound(tau_eff: float, h_cond: float, h_first: float, T: float) -> float:
    """Effective-horizon entropy bound.

    (1 + log tau_eff + h_cond) / tau_eff + h_first / T, where h_cond is the
    conditional entropy of the new optimum given that a switch occurred and
    h_first the entropy of the initial optimum.  T may be math.inf to drop
    the transient term.
    """
    if tau_eff < 1:
        raise ValueError(f"tau_eff must be >= 1, got {tau_eff}")
    if h_cond < 0 or h_first < 0:
        raise ValueError("entropies must be >= 0")
    tail = 0.0 if math.isinf(T) else h_first / T
    return (1.0 + math.log(tau_eff) + h_cond) / tau_eff + tail


def rice_effective_horizon(tau_id: float) -> float:
    """Zero-crossing effective horizon pi / arccos(exp(-1/(2 tau_id^2))).

    This is the mean time between optimal-action switches for the argmax of
    two independent unit-variance SE-kernel processes; approximately
    pi * tau_id for large tau_id.
    """
    if tau_id <= 0:
        raise ValueError(f"tau_id must be > 0, got {tau_id}")
    return math.pi / math.acos(math.exp(-1.0 / (2.0 * tau_id * tau_id)))


def news_effective_horizon(k: int, tau: float) -> float:
    """Effective horizon (k+1)/(2(k-1)) * tau of the article-pool environment."""
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    if tau < 1:
        raise ValueError(f"tau must be >= 1, got {tau}")
    return (k + 1) / (2.0 * (k - 1)) * tau


def regret_bound_karmed(sigma: float, k: int, h_rate: float) -> float:
    """Finite-action regret bound sigma * sqrt(2 k h_rate)."""
    if sigma < 0 or h_rate < 0 or k < 1:
        raise ValueError("inputs must be nonnegative with k >= 1")
    return sigma * math.sqrt(2.0 * k * h_rate)


def regret_bound_fullinfo(sigma: float, h_rate: float) -> float:
    """Full-information regret bound sigma * sqrt(2 h_rate)."""
    if sigma < 0 or h_rate < 0:
        raise ValueError("inputs must be nonnegative")
    return sigma * math.sqrt(2.0 * h_rate)


def variation_budget(path) -> float:
    """Pathwise normalized total variation of the suboptimality gaps.

    (1/T) sum_{t>=2} max_a |gap_t(a) - gap_{t-1}(a)| with gap_t(a) =
    max_b mu[t,b] - mu[t,a].  Common variation across arms cancels.  Accepts
    a LatentPath or a raw (T, k) mean matrix.
    """
    mu = np.asarray(getattr(path, "mu", path), dtype=float)
    if mu.ndim != 2 or mu.shape[0] < 2:
        raise ValueError("need a (T, k) mean matrix with T >= 2")
    gaps = mu.max(axis=1, keepdims=True) - mu
    return float(np.abs(np.diff(gaps, axis=0)).max(axis=1).mean() * (mu.shape[0] - 1) / mu.shape[0])


def rate_distortion_bound(v_bar: float, D: float, T: int, k: int) -> float:
    """Rate-distortion upper bound for drifting environments.

    (2 v_bar / D) (1 + log(1 + min(T, D / (2 v_bar))) + log k) + 3 log(kT)/T;
    v_bar = 0 leaves only the 3 log(kT)/T term.
    """
    if D <= 0:
        raise ValueError(f"D must be > 0, got {D}")
    if v_bar < 0 or k < 2 or T < 2:
        raise ValueError("need v_bar >= 0, k >= 2, T >= 2")
    tail = 3.0 * math.log(k * T) / T
    if v_bar == 0.0:
        return tail
    ratio = 2.0 * v_bar / D
    return ratio * (1.0 + math.log(1.0 + min(T, 1.0 / ratio)) + math.log(k)) + tail


def regret_bound_variation(gamma_u: float, v_bar: float, k: int, T: int) -> float:
    """Variation-budget regret bound for a uniformly bounded information ratio.

    5 (gamma_u log(k) v_bar)^(1/3) sqrt(log(1 + min(T, (gamma_u log k)^(1/3)
    / v_bar^(2/3)))) + sqrt(3 gamma_u log(kT) / T); the first term vanishes
    at v_bar = 0.
    """
    if gamma_u <= 0:
        raise ValueError(f"gamma_u must be > 0, got {gamma_u}")
    if v_bar < 0 or k < 2 or T < 2:
        raise ValueError("need v_bar >= 0, k >= 2, T >= 2")
    tail = math.sqrt(3.0 * gamma_u * math.log(k * T) / T)
    if v_bar == 0.0:
        return tail
    scale = gamma_u * math.log(k)
    inner = min(float(T), scale ** (1.0 / 3.0) / v_bar ** (2.0 / 3.0))
    return 5.0 * (scale * v_bar) ** (1.0 / 3.0) * math.sqrt(math.log(1.0 + inner)) + tail


def regret_bound_sts(gamma: float, mi_rate: float) -> float:
    """Satisficing regret bound sqrt(gamma * mi_rate)."""
    if gamma < 0 or mi_rate < 0:
        raise ValueError("inputs must be nonnegative")
    return math.sqrt(gamma * mi_rate)


#: Price-per-nat constants for common feedback structures; callers pick the
#: setting that matches their problem and plug the result into the regret
#: bounds above as gamma.
INFO_RATIO_SETTINGS = {
    "k_armed": "finite-action bandit feedback: 2 sigma^2 k",
    "full_info": "full-information feedback: 2 sigma^2",
    "linear": "linear bandit of dimension d: 2 sigma^2 d",
    "combinatorial": "semi-bandit selection of k out of d items: 2 sigma^2 d / k^2",
    "contextual": "contextual bandit with k base arms: 2 sigma^2 k",
}


def info_ratio_bound(setting: str, sigma: float, k: int | None = None, d: int | None = None) -> float:
    """Information-ratio constant for a named setting (see INFO_RATIO_SETTINGS)."""
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    s2 = 2.0 * sigma * sigma
    if setting == "k_armed" or setting == "contextual":
        if k is None:
            raise ValueError(f"setting {setting!r} needs k")
        return s2 * k
    if setting == "full_info":
        return s2
    if setting == "linear":
        if d is None:
            raise ValueError("setting 'linear' needs d")
        return s2 * d
    if setting == "combinatorial":
        if k is None or d is None:
            raise ValueError("setting 'combinatorial' needs k and d")
        return s2 * d / (k * k)
    raise ValueError(f"unknown setting {setting!r}; known: {sorted(INFO_RATIO_SETTINGS)}")
