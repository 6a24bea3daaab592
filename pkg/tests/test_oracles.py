"""Sanity checks on the test oracles themselves.

The quadrature oracle is the reference for the noncentral-t acceptance
grid, so it gets pinned against a third, unrelated implementation
(scipy.stats.nct) before anything relies on it.
"""

import numpy as np
import pytest
from scipy import stats

import oracles


def test_quadrature_oracle_matches_scipy_nct():
    compared = 0
    for df in (2.0, 5.0, 31.0, 98.0):
        for delta in (-6.0, -2.5, 0.0, 1.0, 4.5):
            for x in (-8.0, -3.0, -0.5, 0.0, 1.5, 6.0, 8.0):
                reference = stats.nct.cdf(x, df, delta)
                if not np.isfinite(reference):
                    # scipy's nct itself fails (nan) in some extreme tails;
                    # nothing to compare there
                    continue
                compared += 1
                assert oracles.nct_cdf_quadrature(x, df, delta) == pytest.approx(
                    reference, abs=5e-11
                )
    assert compared > 120


def test_normal_oracle_matches_scipy():
    for x in np.linspace(-8.0, 8.0, 33):
        assert oracles.normal_cdf_highprec(x) == pytest.approx(
            stats.norm.cdf(x), abs=1e-15
        )
    for p in (0.001, 0.025, 0.5, 0.95, 0.999):
        assert oracles.normal_quantile_highprec(p) == pytest.approx(
            stats.norm.ppf(p), abs=1e-12
        )


def test_delta_solver_oracle_round_trip():
    for q, df, target in ((-2.398, 31.0, 0.025), (1.2, 5.0, 0.9), (0.0, 12.0, 0.5)):
        delta = oracles.solve_delta_quadrature(q, df, target)
        assert oracles.nct_cdf_quadrature(q, df, delta) == pytest.approx(target, abs=1e-10)
