"""Probability distributions underpinning every interval formula.

Standard normal, central t, and noncentral t CDFs plus the matching
quantiles and the regularized incomplete beta they are built from.  These
wrappers validate inputs and raise typed errors; the arithmetic lives in the
active kernel (see :mod:`epci.backend`).

Degrees of freedom are accepted as any positive real, not just the integer
n - d the estimators produce; noncentrality may be any finite real.
"""

from __future__ import annotations

import math

from . import backend
from .errors import DomainError, NumericError


def _require_finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value!r}")
    return value


def _require_prob_open(name: str, value: float) -> float:
    value = float(value)
    if not (0.0 < value < 1.0):  # also rejects nan
        raise DomainError(f"{name} must lie strictly inside (0, 1), got {value!r}")
    return value


def _require_df(df: float) -> float:
    df = float(df)
    if not (math.isfinite(df) and df > 0.0):
        raise DomainError(f"degrees of freedom must be a positive real, got {df!r}")
    return df


def std_normal_cdf(x: float) -> float:
    """Phi(x), the standard normal CDF."""
    x = _require_finite("x", x)
    return backend.active().norm_cdf(x)


def std_normal_quantile(p: float) -> float:
    """Inverse of :func:`std_normal_cdf` on (0, 1)."""
    p = _require_prob_open("p", p)
    result = backend.active().norm_quantile(p)
    if math.isnan(result):
        raise NumericError(f"normal quantile failed to bracket p={p!r}")
    return result


def regularized_incomplete_beta(x: float, a: float, b: float) -> float:
    """I_x(a, b), the regularized incomplete beta function."""
    x = float(x)
    a = float(a)
    b = float(b)
    if not (0.0 <= x <= 1.0):
        raise DomainError(f"x must lie in [0, 1], got {x!r}")
    if not (math.isfinite(a) and a > 0.0) or not (math.isfinite(b) and b > 0.0):
        raise DomainError(f"shape parameters must be positive reals, got a={a!r}, b={b!r}")
    result = backend.active().betainc(x, a, b)
    if math.isnan(result):
        raise NumericError(
            f"incomplete beta continued fraction stalled at x={x!r}, a={a!r}, b={b!r}"
        )
    return result


def central_t_cdf(x: float, df: float) -> float:
    """CDF of the central t distribution with ``df`` degrees of freedom."""
    x = _require_finite("x", x)
    df = _require_df(df)
    result = backend.active().central_t_cdf(x, df)
    if math.isnan(result):
        raise NumericError(f"central t CDF failed at x={x!r}, df={df!r}")
    return result


def central_t_quantile(p: float, df: float) -> float:
    """Inverse of :func:`central_t_cdf` in its first argument."""
    p = _require_prob_open("p", p)
    df = _require_df(df)
    result = backend.active().central_t_quantile(p, df)
    if math.isnan(result):
        raise NumericError(f"central t quantile did not converge for p={p!r}, df={df!r}")
    return result


def noncentral_t_cdf(x: float, df: float, delta: float) -> float:
    """CDF of the noncentral t distribution.

    Evaluated as a series over half-integer-shifted regularized incomplete
    beta terms for x >= 0 and by the reflection
    F(x; df, delta) = 1 - F(-x; df, -delta) otherwise.  Probabilities beyond
    the series resolution (absolute tolerance 1e-12) are clamped to exact
    0 or 1.
    """
    x = _require_finite("x", x)
    df = _require_df(df)
    delta = _require_finite("delta", delta)
    kern = backend.active()
    result = kern.noncentral_t_cdf(x, df, delta)
    if math.isnan(result):
        raise NumericError(
            "noncentral t series did not converge within "
            f"{kern.NCT_MAX_ITER} terms at x={x!r}, df={df!r}, delta={delta!r} "
            f"(absolute tolerance {kern.NCT_TOL})"
        )
    return result
