"""Softmin importance weights and the self-normalized weighted average.

All weight arithmetic happens in log space with a max shift; the raw ratio
exp(-alpha f) / q is never formed.  The temperature grows polynomially with
the sample count, so forming it directly would underflow double precision
long before the interesting regime.
"""

from __future__ import annotations

import numpy as np

Array = np.ndarray


class DegenerateWeightsError(ValueError):
    """Every log-weight is -inf; the caller decides the fallback."""


def laplace_log_weights(alpha: float, values: Array, sample_log_densities: Array) -> Array:
    """Log importance weights  -alpha * (f(X^i) - min_j f(X^j)) - log q(X^i).

    The best value is subtracted before scaling by alpha.  Under
    self-normalization this common constant is free, and anchoring the
    weights at the best value keeps the alpha multiplication small in
    magnitude, so additive shifts of the objective cancel exactly instead of
    being amplified by alpha through floating-point rounding.

    ``values`` may contain +inf as a zero-weight sentinel (infinite penalty),
    which maps to a -inf log-weight.  If every value is +inf, all log-weights
    are -inf; downstream consumers raise :class:`DegenerateWeightsError`.
    """
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    values = np.asarray(values, dtype=float)
    logq = np.asarray(sample_log_densities, dtype=float)
    if values.shape != logq.shape:
        raise ValueError("values and sample_log_densities must share a shape")
    if np.any(np.isnan(values)) or np.any(values == -np.inf):
        raise ValueError("values must be finite or +inf")
    if not np.all(np.isfinite(logq)):
        raise ValueError("sample log-densities must be finite")
    finite = values != np.inf
    if not np.any(finite):
        return np.full(values.shape, -np.inf)
    ref = np.min(values[finite])
    with np.errstate(invalid="ignore"):
        lw = -alpha * (values - ref) - logq
    lw[~finite] = -np.inf
    return lw


def normalized_weights(log_weights: Array) -> Array:
    """Max-shifted softmax of the log-weights; nonnegative, sums to 1."""
    lw = np.asarray(log_weights, dtype=float)
    m = np.max(lw)
    if m == -np.inf:
        raise DegenerateWeightsError("all log-weights are -inf")
    w = np.exp(lw - m)
    return w / np.sum(w)


def self_normalized_average(points: Array, log_weights: Array) -> Array:
    """Weighted average of the rows of ``points`` under softmax weights.

    The result is a convex combination of the points, and adding any constant
    to all log-weights leaves it unchanged (self-normalization): objective
    shifts and unknown normalizers cancel.
    """
    points = np.asarray(points, dtype=float)
    lw = np.asarray(log_weights, dtype=float)
    if points.ndim != 2 or points.shape[0] != lw.shape[0]:
        raise ValueError("points must be (n, d) with one log-weight per row")
    p = normalized_weights(lw)
    return p @ points


def effective_sample_size(log_weights: Array) -> float:
    """1 / sum(p_i^2) for the normalized weights p; lies in [1, n].

    Diagnostic only: low values signal importance-weight degeneracy.
    """
    p = normalized_weights(log_weights)
    return float(1.0 / np.sum(p * p))


def bootstrap_stderr(
    points: Array,
    log_weights: Array,
    rng: np.random.Generator,
    resamples: int = 200,
) -> Array:
    """Componentwise bootstrap standard error of the weighted average.

    Resamples the (point, log-weight) pairs with replacement and recomputes
    the estimator per resample.
    """
    points = np.asarray(points, dtype=float)
    lw = np.asarray(log_weights, dtype=float)
    n = points.shape[0]
    estimates = np.empty((resamples, points.shape[1]))
    for b in range(resamples):
        idx = rng.integers(0, n, size=n)
        estimates[b] = self_normalized_average(points[idx], lw[idx])
    return np.std(estimates, axis=0, ddof=1)
