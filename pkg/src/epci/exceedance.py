"""Exceedance probabilities for replication estimates, with intervals.

The exceedance probability is Pr(theta_hat_rep > c): the chance that an
exact replication study of size m produces a point estimate above the
cutoff c.  This module provides the plug-in point estimate, confidence
intervals built from the noncentral-t pivotal quantity
sqrt(n)(c - theta_hat)/sigma_hat, curves over cutoff grids, and the
companion parameter CIs / p-values they relate to.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence, Union

from . import backend
from .distributions import central_t_quantile, std_normal_quantile
from .errors import DegenerateFitError, DomainError, NumericError, ValidationError
from .models import FitSummary

__all__ = [
    "Side",
    "ExceedanceQuery",
    "IntervalEstimate",
    "EpCurve",
    "true_exceedance",
    "point_estimate",
    "solve_noncentrality",
    "ep_confidence_interval",
    "ep_curve",
    "default_cutoff_grid",
    "parameter_ci",
    "p_value",
    "power_cutoff",
]


class Side(str, Enum):
    """Sidedness of an interval or test."""

    TWO_SIDED = "two_sided"
    LOWER_ONE_SIDED = "lower_one_sided"
    UPPER_ONE_SIDED = "upper_one_sided"


SideLike = Union[Side, str]


def _as_side(side: SideLike) -> Side:
    try:
        return Side(side)
    except ValueError:
        raise ValidationError(
            f"side must be one of {[s.value for s in Side]}, got {side!r}"
        ) from None


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not (0.0 < alpha < 1.0):
        raise DomainError(f"alpha must lie strictly inside (0, 1), got {alpha!r}")
    return alpha


def _check_rep_size(m: int) -> int:
    m = int(m)
    if m < 1:
        raise ValidationError(f"replication size must be at least 1, got {m}")
    return m


@dataclass(frozen=True)
class ExceedanceQuery:
    """One exceedance question: cutoff, replication size, level, sidedness.

    ``coefficient`` indexes the fit's coefficients starting at 1, matching
    the usual statistical numbering (1 = intercept in a regression fit).
    """

    cutoff: float
    rep_size: int
    alpha: float = 0.05
    side: Side = Side.TWO_SIDED
    coefficient: int = 1

    def __post_init__(self):
        object.__setattr__(self, "cutoff", float(self.cutoff))
        object.__setattr__(self, "rep_size", _check_rep_size(self.rep_size))
        object.__setattr__(self, "alpha", _check_alpha(self.alpha))
        object.__setattr__(self, "side", _as_side(self.side))
        object.__setattr__(self, "coefficient", int(self.coefficient))
        if not math.isfinite(self.cutoff):
            raise DomainError(f"cutoff must be finite, got {self.cutoff!r}")
        if self.coefficient < 1:
            raise ValidationError(f"coefficient index starts at 1, got {self.coefficient}")


@dataclass(frozen=True)
class IntervalEstimate:
    """Point estimate with lower/upper probability bounds.

    For alpha <= 0.5 the point lies inside the band; larger alpha values
    are legal but carry no such guarantee.
    """

    point: float
    lower: float
    upper: float

    def __post_init__(self):
        if not (0.0 <= self.lower <= self.upper <= 1.0):
            raise ValidationError(
                f"require 0 <= lower <= upper <= 1, got [{self.lower}, {self.upper}]"
            )
        if not (0.0 <= self.point <= 1.0):
            raise ValidationError(f"point must be a probability, got {self.point!r}")


@dataclass(frozen=True)
class EpCurve:
    """Pointwise exceedance estimates along an increasing cutoff grid."""

    cutoffs: tuple[float, ...]
    estimates: tuple[IntervalEstimate, ...]
    fit: FitSummary
    rep_size: int
    alpha: float
    side: Side = field(default=Side.TWO_SIDED)
    coefficient: int = 1

    def __len__(self) -> int:
        return len(self.cutoffs)


def _coef(fit: FitSummary, j: int) -> tuple[float, float]:
    """(theta_hat_j, sigma_hat_j) for 1-based j, with degeneracy checks."""
    if not 1 <= j <= len(fit.theta_hat):
        raise ValidationError(
            f"coefficient index {j} out of range 1..{len(fit.theta_hat)}"
        )
    theta = fit.theta_hat[j - 1]
    sigma = fit.sigma_hat[j - 1]
    if sigma <= 0.0:
        raise DegenerateFitError(
            "sigma_hat is zero: the pivotal quantity is undefined for a fit "
            "with no residual variability"
        )
    return theta, sigma


def true_exceedance(theta: float, sigma: float, c: float, m: int) -> float:
    """Pr(theta_hat_rep > c) at known population values: 1 - Phi(sqrt(m)(c - theta)/sigma)."""
    sigma = float(sigma)
    if not (math.isfinite(sigma) and sigma > 0.0):
        raise DomainError(f"sigma must be a positive real, got {sigma!r}")
    m = _check_rep_size(m)
    theta = float(theta)
    c = float(c)
    if not (math.isfinite(theta) and math.isfinite(c)):
        raise DomainError("theta and c must be finite")
    return backend.active().norm_sf(math.sqrt(m) * (c - theta) / sigma)


def point_estimate(fit: FitSummary, query: ExceedanceQuery) -> float:
    """Plug-in estimate of the exceedance probability at the fitted values."""
    theta, sigma = _coef(fit, query.coefficient)
    return true_exceedance(theta, sigma, query.cutoff, query.rep_size)


def solve_noncentrality(q: float, df: float, target: float) -> float:
    """Solve F(q; df, delta) = target for the noncentrality delta.

    The noncentral-t CDF is strictly decreasing in delta, so the solution is
    unique; it is bracketed around q and bisected to 1e-10 on the delta
    scale.
    """
    q = float(q)
    if not math.isfinite(q):
        raise DomainError(f"q must be finite, got {q!r}")
    df = float(df)
    if not (math.isfinite(df) and df > 0.0):
        raise DomainError(f"degrees of freedom must be positive, got {df!r}")
    target = float(target)
    if not (0.0 < target < 1.0):
        raise DomainError(f"target must lie strictly inside (0, 1), got {target!r}")
    result = backend.active().solve_noncentrality(q, df, target)
    if math.isnan(result):
        raise NumericError(
            f"noncentrality solver failed for q={q!r}, df={df!r}, target={target!r} "
            "(bracket expansion exhausted or series non-convergence)"
        )
    return result


def ep_confidence_interval(fit: FitSummary, query: ExceedanceQuery) -> IntervalEstimate:
    """Confidence interval for the exceedance probability at one cutoff.

    Solves for the noncentrality bounds delta_L/delta_U of the pivot
    q = sqrt(n)(c - theta_hat)/sigma_hat and maps them through
    1 - Phi(sqrt(m/n) delta).  One-sided variants pin the other end of the
    band at 0 or 1.

    The plug-in point estimate lies inside a two-sided band whenever
    alpha <= 0.5.  For one-sided bands that containment is only guaranteed
    up to alpha <= Pr(chi2_dof > dof) (about 0.32 at one degree of freedom,
    approaching 0.5 for large dof); beyond it the bound can cross the point
    estimate far in the tails, though the interval keeps its coverage.
    """
    theta, sigma = _coef(fit, query.coefficient)
    kern = backend.active()
    n = fit.n
    q = math.sqrt(n) * (query.cutoff - theta) / sigma
    if not math.isfinite(q):
        raise NumericError(f"pivot overflowed at cutoff {query.cutoff!r}")
    df = float(fit.dof)
    scale = math.sqrt(query.rep_size / n)
    alpha = query.alpha

    def _delta(target: float) -> float:
        result = kern.solve_noncentrality(q, df, target)
        if math.isnan(result):
            raise NumericError(
                f"noncentrality solver failed at cutoff {query.cutoff!r} "
                f"(q={q!r}, df={df!r}, target={target!r})"
            )
        return result

    if query.side is Side.TWO_SIDED:
        lower = kern.norm_sf(scale * _delta(alpha / 2.0))
        upper = kern.norm_sf(scale * _delta(1.0 - alpha / 2.0))
    elif query.side is Side.LOWER_ONE_SIDED:
        lower = kern.norm_sf(scale * _delta(alpha))
        upper = 1.0
    else:
        lower = 0.0
        upper = kern.norm_sf(scale * _delta(1.0 - alpha))

    point = kern.norm_sf(math.sqrt(query.rep_size) * (query.cutoff - theta) / sigma)
    return IntervalEstimate(point=point, lower=lower, upper=upper)


def default_cutoff_grid(
    fit: FitSummary, coefficient: int = 1, points: int = 201, half_width: float = 4.0
) -> tuple[float, ...]:
    """Evenly spaced cutoffs spanning theta_hat +/- 4 standard errors."""
    theta, sigma = _coef(fit, coefficient)
    if points < 1:
        raise ValidationError(f"need at least one grid point, got {points}")
    se = sigma / math.sqrt(fit.n)
    if points == 1:
        return (theta,)
    lo = theta - half_width * se
    hi = theta + half_width * se
    step = (hi - lo) / (points - 1)
    return tuple(lo + i * step for i in range(points))


def ep_curve(
    fit: FitSummary,
    cutoffs: Sequence[float],
    rep_size: int,
    alpha: float = 0.05,
    side: SideLike = Side.TWO_SIDED,
    coefficient: int = 1,
) -> EpCurve:
    """Exceedance point estimates and bands along an increasing cutoff grid."""
    side = _as_side(side)
    cutoffs = tuple(float(c) for c in cutoffs)
    if not cutoffs:
        raise ValidationError("cutoff grid is empty")
    if any(b <= a for a, b in zip(cutoffs, cutoffs[1:])):
        raise ValidationError("cutoffs must be strictly increasing")
    estimates = []
    for c in cutoffs:
        query = ExceedanceQuery(
            cutoff=c, rep_size=rep_size, alpha=alpha, side=side, coefficient=coefficient
        )
        try:
            estimates.append(ep_confidence_interval(fit, query))
        except NumericError as exc:
            raise NumericError(f"cutoff {c!r}: {exc}") from exc
    return EpCurve(
        cutoffs=cutoffs,
        estimates=tuple(estimates),
        fit=fit,
        rep_size=int(rep_size),
        alpha=float(alpha),
        side=side,
        coefficient=int(coefficient),
    )


def parameter_ci(
    fit: FitSummary,
    coefficient: int = 1,
    alpha: float = 0.05,
    side: SideLike = Side.TWO_SIDED,
) -> tuple[float, float]:
    """t-based confidence interval for the coefficient itself.

    Two-sided: theta_hat +/- t_{n-d,1-alpha/2} sigma_hat / sqrt(n).
    One-sided intervals use the 1-alpha quantile and are unbounded on the
    other end.
    """
    side = _as_side(side)
    alpha = _check_alpha(alpha)
    theta, sigma = _coef(fit, coefficient)
    se = sigma / math.sqrt(fit.n)
    df = float(fit.dof)
    if side is Side.TWO_SIDED:
        t = central_t_quantile(1.0 - alpha / 2.0, df)
        return theta - t * se, theta + t * se
    t = central_t_quantile(1.0 - alpha, df)
    if side is Side.LOWER_ONE_SIDED:
        return theta - t * se, math.inf
    return -math.inf, theta + t * se


def p_value(
    fit: FitSummary,
    coefficient: int = 1,
    cutoff: float = 0.0,
    side: SideLike = Side.TWO_SIDED,
) -> float:
    """t-test p-value for the coefficient against the cutoff.

    two_sided tests H0: theta = c; lower_one_sided tests H0: theta <= c
    (rejection supports theta > c, pairing with the lower CI);
    upper_one_sided mirrors it.
    """
    side = _as_side(side)
    cutoff = float(cutoff)
    if not math.isfinite(cutoff):
        raise DomainError(f"cutoff must be finite, got {cutoff!r}")
    theta, sigma = _coef(fit, coefficient)
    kern = backend.active()
    df = float(fit.dof)
    stat = math.sqrt(fit.n) * (cutoff - theta) / sigma
    if side is Side.TWO_SIDED:
        return 2.0 * (1.0 - kern.central_t_cdf(abs(stat), df))
    if side is Side.LOWER_ONE_SIDED:
        return kern.central_t_cdf(stat, df)
    return kern.central_t_cdf(-stat, df)


def power_cutoff(theta0: float, sigma: float, n: int, alpha: float) -> float:
    """Cutoff at which the exceedance probability equals one-sided power.

    Returns theta0 + z_{1-alpha} sigma / sqrt(n): with m = n, the true
    exceedance probability at this cutoff is the power of the level-alpha
    test of H0: theta <= theta0.
    """
    sigma = float(sigma)
    if not (math.isfinite(sigma) and sigma > 0.0):
        raise DomainError(f"sigma must be a positive real, got {sigma!r}")
    n = int(n)
    if n < 1:
        raise ValidationError(f"n must be at least 1, got {n}")
    alpha = _check_alpha(alpha)
    theta0 = float(theta0)
    if not math.isfinite(theta0):
        raise DomainError(f"theta0 must be finite, got {theta0!r}")
    return theta0 + std_normal_quantile(1.0 - alpha) * sigma / math.sqrt(n)
