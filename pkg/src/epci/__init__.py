"""Exceedance probability confidence intervals for exact replication studies.

Given an initial study's estimate, this package answers "with what
probability would an exact replication of size m produce an estimate above
the cutoff c?" -- as a plug-in point estimate and, more importantly, with a
confidence interval built from the noncentral-t pivotal quantity, so the
uncertainty in both the estimate and its scale is carried through to the
probability scale.

The numerical core runs on a compiled Cython kernel when available and
falls back to a pure-Python twin otherwise (see :mod:`epci.backend`).
"""

from . import backend
from .errors import (
    DegenerateFitError,
    DomainError,
    EpciError,
    InsufficientDataError,
    NumericError,
    SingularDesignError,
    ValidationError,
    WeightMatrixError,
)
from .exceedance import (
    EpCurve,
    ExceedanceQuery,
    IntervalEstimate,
    Side,
    default_cutoff_grid,
    ep_confidence_interval,
    ep_curve,
    p_value,
    parameter_ci,
    point_estimate,
    power_cutoff,
    solve_noncentrality,
    true_exceedance,
)
from .models import (
    Dataset,
    FitSummary,
    fit_linear_regression,
    fit_sample_mean,
    summary_from_stats,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "backend",
    # errors
    "EpciError",
    "DomainError",
    "ValidationError",
    "InsufficientDataError",
    "SingularDesignError",
    "WeightMatrixError",
    "DegenerateFitError",
    "NumericError",
    # models
    "Dataset",
    "FitSummary",
    "fit_sample_mean",
    "fit_linear_regression",
    "summary_from_stats",
    # exceedance
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
