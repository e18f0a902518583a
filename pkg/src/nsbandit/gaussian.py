"""Dense Gaussian numerics shared by the exact-posterior policies.

Cholesky factorization with jitter escalation, multivariate normal sampling,
batch Gaussian conditioning via Schur complements, and the two scalar Kalman
recursion steps used by the AR(1) Thompson sampling policy.

Everything here is a pure function over immutable inputs, except for the
numpy Generator handles which are owned and mutated by the caller.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

__all__ = [
    "NotPositiveDefinite",
    "GaussianBelief",
    "ConditionalGaussian",
    "check_symmetric",
    "cholesky",
    "cholesky_with_info",
    "mvn_sample",
    "condition",
    "kalman_diffuse",
    "kalman_update",
]

#: Number of times a failed factorization retries with 10x the jitter.
JITTER_RETRIES = 3


class NotPositiveDefinite(Exception):
    """Matrix could not be Cholesky-factored, even after jitter escalation."""


@dataclass(frozen=True)
class GaussianBelief:
    """Scalar Gaussian posterior (mean, variance) maintained per arm."""

    mean: float
    variance: float

    def __post_init__(self):
        if not np.isfinite(self.mean) or not np.isfinite(self.variance):
            raise ValueError("belief mean/variance must be finite")
        if self.variance < 0:
            raise ValueError(f"belief variance must be >= 0, got {self.variance}")


@dataclass(frozen=True)
class ConditionalGaussian:
    """Multivariate Gaussian given by a mean vector and covariance matrix."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        if self.mean.shape[0] != self.cov.shape[0] or self.cov.shape[0] != self.cov.shape[1]:
            raise ValueError("mean/cov dimension mismatch")


def check_symmetric(m: np.ndarray, rel_tol: float = 1e-12) -> None:
    """Raise ValueError unless ``m`` is square and symmetric to ``rel_tol`` (relative)."""
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if m.shape[0] < 1:
        raise ValueError("matrix dimension must be >= 1")
    scale = max(1.0, float(np.max(np.abs(m))))
    if float(np.max(np.abs(m - m.T))) > rel_tol * scale:
        raise ValueError("matrix is not symmetric")


def cholesky_with_info(m: np.ndarray, jitter: float = 0.0) -> tuple[np.ndarray, float]:
    """Lower Cholesky factor of ``m + jitter*I`` with x10 jitter escalation.

    Attempts the factorization with the requested jitter; on failure retries
    up to three times, multiplying the jitter by 10 each time.  A requested
    jitter of exactly 0 therefore never escalates.

    Args:
        m: symmetric matrix (validated to 1e-12 relative symmetry).
        jitter: nonnegative ridge added to the diagonal.

    Returns:
        (L, used_jitter) with ``L @ L.T == m + used_jitter*I`` up to rounding.

    Raises:
        NotPositiveDefinite: if every attempt fails.
    """
    check_symmetric(m)
    if jitter < 0:
        raise ValueError(f"jitter must be >= 0, got {jitter}")
    m = np.asarray(m, dtype=float)
    eye = np.eye(m.shape[0])
    j = float(jitter)
    for attempt in range(JITTER_RETRIES + 1):
        try:
            return np.linalg.cholesky(m + j * eye if j > 0 else m), j
        except np.linalg.LinAlgError:
            j *= 10.0
    raise NotPositiveDefinite(
        f"Cholesky failed for {m.shape[0]}x{m.shape[0]} matrix "
        f"(base jitter {jitter:g}, escalated {JITTER_RETRIES} times)"
    )


def cholesky(m: np.ndarray, jitter: float = 0.0) -> np.ndarray:
    """Lower Cholesky factor of ``m + jitter*I``; see :func:`cholesky_with_info`."""
    return cholesky_with_info(m, jitter)[0]


def mvn_sample(mean, chol, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Draw ``mean + chol @ z`` with z i.i.d. standard normal.

    Args:
        mean: length-n mean vector.
        chol: lower-triangular n x n factor of the covariance.
        rng: numpy Generator (mutated).
        size: if given, return ``size`` draws stacked as a (size, n) array.

    Returns:
        One draw of shape (n,), or (size, n) when ``size`` is given.
    """
    mean = np.asarray(mean, dtype=float)
    chol = np.asarray(chol, dtype=float)
    n = mean.shape[0]
    if chol.shape != (n, n):
        raise ValueError(f"dimension mismatch: mean has {n}, chol has shape {chol.shape}")
    if size is None:
        return mean + chol @ rng.standard_normal(n)
    return mean + rng.standard_normal((size, n)) @ chol.T


def condition(
    joint_mean,
    joint_cov,
    observed_idx,
    observed_vals,
    jitter: float = 0.0,
) -> ConditionalGaussian:
    """Condition a joint Gaussian on observed coordinates.

    Computes the conditional law of the unobserved block given the observed
    values, using the Schur complement with triangular solves against the
    Cholesky factor of the observed block (no explicit matrix inversion).

    Args:
        joint_mean: length-n mean of the joint vector.
        joint_cov: n x n symmetric covariance of the joint vector.
        observed_idx: distinct indices of the observed coordinates.
        observed_vals: values observed at those coordinates.
        jitter: base jitter for factoring the observed block.

    Returns:
        ConditionalGaussian over the unobserved coordinates, in their
        original order.  Conditioning on an empty index set returns the
        prior unchanged.
    """
    mean = np.asarray(joint_mean, dtype=float)
    cov = np.asarray(joint_cov, dtype=float)
    check_symmetric(cov)
    n = mean.shape[0]
    if cov.shape[0] != n:
        raise ValueError("joint mean/cov dimension mismatch")
    obs = np.asarray(observed_idx, dtype=int)
    vals = np.asarray(observed_vals, dtype=float)
    if obs.size != vals.size:
        raise ValueError("observed_idx and observed_vals must have equal length")
    if obs.size == 0:
        return ConditionalGaussian(mean.copy(), cov.copy())
    if len(set(obs.tolist())) != obs.size:
        raise ValueError("observed indices must be distinct")
    if obs.min() < 0 or obs.max() >= n:
        raise ValueError("observed index out of range")

    mask = np.ones(n, dtype=bool)
    mask[obs] = False
    free = np.flatnonzero(mask)

    s_oo = cov[np.ix_(obs, obs)]
    s_uo = cov[np.ix_(free, obs)]
    s_uu = cov[np.ix_(free, free)]

    chol_oo = cholesky(s_oo, jitter)
    # A = L^-1 Sigma_ou,  b = L^-1 (v - mu_o)
    a = solve_triangular(chol_oo, s_uo.T, lower=True, check_finite=False)
    b = solve_triangular(chol_oo, vals - mean[obs], lower=True, check_finite=False)
    cond_mean = mean[free] + a.T @ b
    cond_cov = s_uu - a.T @ a
    # symmetrize away rounding skew so downstream factorizations see a SymMatrix
    cond_cov = 0.5 * (cond_cov + cond_cov.T)
    return ConditionalGaussian(cond_mean, cond_cov)


def kalman_diffuse(b: GaussianBelief, alpha: float, sigma_xi_sq: float) -> GaussianBelief:
    """One time-step diffusion of a per-arm belief under the AR(1) state model.

    mean <- alpha * mean, variance <- alpha^2 * variance + sigma_xi_sq.
    """
    if sigma_xi_sq < 0:
        raise ValueError(f"sigma_xi_sq must be >= 0, got {sigma_xi_sq}")
    return GaussianBelief(alpha * b.mean, alpha * alpha * b.variance + sigma_xi_sq)


def kalman_update(b: GaussianBelief, reward: float, sigma_w_sq: float) -> GaussianBelief:
    """Precision-weighted measurement update of a per-arm belief.

    new mean = (nu^-1 mu + sigma_w^-2 R) / (nu^-1 + sigma_w^-2), and the new
    variance is the reciprocal of the summed precisions.  A zero-variance
    belief is treated as infinitely precise and returned unchanged.
    """
    if sigma_w_sq <= 0:
        raise ValueError(f"sigma_w_sq must be > 0, got {sigma_w_sq}")
    if b.variance == 0.0:
        return b
    prec = 1.0 / b.variance
    obs_prec = 1.0 / sigma_w_sq
    total = prec + obs_prec
    return GaussianBelief((prec * b.mean + obs_prec * reward) / total, 1.0 / total)
