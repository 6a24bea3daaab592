"""Estimators for linear combinations of normal observations.

Both fits reduce a dataset to the sufficient statistics consumed by the
interval layer: coefficient estimates, their marginal scale, the residual
variance, and the sample dimensions.  ``sigma_hat`` is stored on the scale
whose standard error is ``sigma_hat / sqrt(n)``; for the sample mean it is
simply the sample standard deviation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (
    InsufficientDataError,
    SingularDesignError,
    ValidationError,
    WeightMatrixError,
)

_RANK_RTOL = 1e-10


@dataclass
class Dataset:
    """Observed data: outcome vector, optional covariates, optional weights.

    ``covariates`` holds the non-intercept columns only (n x (d-1)); an
    intercept column is always prepended by :func:`fit_linear_regression`.
    ``weight_matrix`` is the known symmetric positive-definite V in
    y ~ N(X theta, nu^2 V); identity when absent.
    """

    outcome: np.ndarray
    covariates: Optional[np.ndarray] = None
    weight_matrix: Optional[np.ndarray] = None

    def __post_init__(self):
        self.outcome = np.asarray(self.outcome, dtype=np.float64)
        if self.outcome.ndim != 1:
            raise ValidationError("outcome must be a one-dimensional sequence")
        if not np.all(np.isfinite(self.outcome)):
            raise ValidationError("outcome contains non-finite values")
        n = self.outcome.shape[0]
        if n < 2:
            raise InsufficientDataError(f"need at least 2 observations, got {n}")
        if self.covariates is not None:
            self.covariates = np.asarray(self.covariates, dtype=np.float64)
            if self.covariates.ndim == 1:
                self.covariates = self.covariates[:, None]
            if self.covariates.ndim != 2 or self.covariates.shape[0] != n:
                raise ValidationError(
                    f"covariates must be an {n} x k matrix, got shape "
                    f"{self.covariates.shape}"
                )
            if not np.all(np.isfinite(self.covariates)):
                raise ValidationError("covariates contain non-finite values")
        if self.weight_matrix is not None:
            V = np.asarray(self.weight_matrix, dtype=np.float64)
            if V.shape != (n, n):
                raise WeightMatrixError(f"weight matrix must be {n} x {n}, got {V.shape}")
            if not np.allclose(V, V.T, rtol=1e-12, atol=1e-12):
                raise WeightMatrixError("weight matrix is not symmetric")
            try:
                np.linalg.cholesky(V)
            except np.linalg.LinAlgError as exc:
                raise WeightMatrixError("weight matrix is not positive definite") from exc
            self.weight_matrix = V

    @property
    def n(self) -> int:
        return self.outcome.shape[0]


@dataclass(frozen=True)
class FitSummary:
    """Sufficient statistics from which all inference flows.

    ``sigma_hat[j] / sqrt(n)`` is the standard error of ``theta_hat[j]``.
    Zero entries in ``sigma_hat`` are valid summaries of degenerate data;
    the interval operations reject them at use time.

    Full fits carry all d coefficients.  A summary built from published
    statistics may carry fewer (usually one) while keeping ``d`` as the
    parameter count of the original model, so that the residual degrees of
    freedom n - d stay right.
    """

    theta_hat: tuple[float, ...]
    sigma_hat: tuple[float, ...]
    nu_hat_sq: float
    n: int
    d: int

    def __post_init__(self):
        object.__setattr__(self, "theta_hat", tuple(float(v) for v in self.theta_hat))
        object.__setattr__(self, "sigma_hat", tuple(float(v) for v in self.sigma_hat))
        object.__setattr__(self, "nu_hat_sq", float(self.nu_hat_sq))
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "d", int(self.d))
        if self.d < 1:
            raise ValidationError(f"d must be at least 1, got {self.d}")
        if self.n <= self.d:
            raise InsufficientDataError(f"need n > d, got n={self.n}, d={self.d}")
        if len(self.theta_hat) != len(self.sigma_hat):
            raise ValidationError("theta_hat and sigma_hat must have equal length")
        if not 1 <= len(self.theta_hat) <= self.d:
            raise ValidationError("coefficient sequences must have length in [1, d]")
        if any(not np.isfinite(v) for v in self.theta_hat):
            raise ValidationError("theta_hat contains non-finite values")
        if any(not (np.isfinite(v) and v >= 0.0) for v in self.sigma_hat):
            raise ValidationError("sigma_hat entries must be finite and >= 0")
        if not (np.isfinite(self.nu_hat_sq) and self.nu_hat_sq >= 0.0):
            raise ValidationError("nu_hat_sq must be finite and >= 0")

    @property
    def dof(self) -> int:
        """Residual degrees of freedom n - d."""
        return self.n - self.d


def fit_sample_mean(data: Dataset) -> FitSummary:
    """Sample mean and standard deviation as a single-coefficient fit."""
    if data.covariates is not None:
        raise ValidationError("sample-mean fit takes an outcome-only dataset")
    y = data.outcome
    n = data.n
    mean = float(np.mean(y))
    nu_sq = float(np.sum((y - mean) ** 2) / (n - 1))
    return FitSummary(
        theta_hat=(mean,),
        sigma_hat=(float(np.sqrt(nu_sq)),),
        nu_hat_sq=nu_sq,
        n=n,
        d=1,
    )


def fit_linear_regression(data: Dataset) -> FitSummary:
    """Least squares fit with an intercept, optionally V-weighted.

    Solves the generalized normal equations through a Cholesky whitening of
    V followed by a QR factorization (no explicit inverses).  Coefficient 1
    is the intercept; covariate j sits at coefficient j + 1.
    """
    if data.covariates is None:
        X = np.ones((data.n, 1))
    else:
        X = np.hstack([np.ones((data.n, 1)), data.covariates])
    n, d = X.shape
    if n <= d:
        raise InsufficientDataError(f"need n > d, got n={n}, d={d}")
    y = data.outcome

    if data.weight_matrix is not None:
        try:
            L = np.linalg.cholesky(data.weight_matrix)
        except np.linalg.LinAlgError as exc:
            raise WeightMatrixError("weight matrix is not positive definite") from exc
        Xw = np.linalg.solve(L, X)
        yw = np.linalg.solve(L, y)
    else:
        Xw, yw = X, y

    Q, R = np.linalg.qr(Xw)
    pivots = np.abs(np.diag(R))
    if pivots.min() < _RANK_RTOL * pivots.max():
        raise SingularDesignError(
            "design matrix is rank deficient after prepending the intercept"
        )
    theta = np.linalg.solve(R, Q.T @ yw)

    resid = y - X @ theta
    nu_sq = float(resid @ resid / (n - d))

    # diag of (X' V^-1 X)^-1 = R^-1 R^-T via the rows of R^-1
    Rinv = np.linalg.inv(R)
    gram_diag = np.sum(Rinv**2, axis=1)
    sigma = np.sqrt(n * nu_sq * gram_diag)

    return FitSummary(
        theta_hat=tuple(theta),
        sigma_hat=tuple(sigma),
        nu_hat_sq=nu_sq,
        n=n,
        d=d,
    )


def summary_from_stats(theta_hat: float, sigma_hat: float, n: int, d: int = 1) -> FitSummary:
    """Single-coefficient summary from published statistics.

    ``sigma_hat`` is the marginal scale whose standard error is
    sigma_hat / sqrt(n) (the sample standard deviation, for a mean).
    """
    theta_hat = float(theta_hat)
    sigma_hat = float(sigma_hat)
    if not np.isfinite(theta_hat):
        raise ValidationError(f"theta_hat must be finite, got {theta_hat!r}")
    if not (np.isfinite(sigma_hat) and sigma_hat > 0.0):
        raise ValidationError(f"sigma_hat must be a positive real, got {sigma_hat!r}")
    return FitSummary(
        theta_hat=(theta_hat,),
        sigma_hat=(sigma_hat,),
        nu_hat_sq=sigma_hat**2,
        n=n,
        d=d,
    )
