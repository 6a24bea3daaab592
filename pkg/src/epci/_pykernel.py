"""Scalar numerical kernel, pure-Python edition.

Mirrors the compiled kernel (``epci._ckernel``) function for function.  The
compiled twin is preferred at import time; this module keeps the package
fully usable without a C toolchain, at roughly 50x the runtime on the hot
paths.

Conventions shared by both kernels:

* inputs are assumed pre-validated (the public wrappers in
  :mod:`epci.distributions` / :mod:`epci.exceedance` do the checking),
* ``nan`` signals non-convergence; the wrappers turn it into a typed error,
* probabilities are clamped to ``[0, 1]``: values beyond series resolution
  come back as exact 0 or 1 instead of over/undershooting.
"""

from __future__ import annotations

import math

import numpy as np

_SQRT2 = math.sqrt(2.0)
_EPS = 2.220446049250313e-16

# incomplete-beta continued fraction
_CF_MAX_ITER = 2000
_CF_TINY = 1e-300
_CF_EPS = 1e-16

# noncentral-t series: absolute truncation tolerance and iteration budget
NCT_TOL = 1e-12
NCT_MAX_ITER = 10_000

# noncentrality solver: bracket half-width, geometric expansion cap,
# bisection tolerance on the delta scale
DELTA_HALF_WIDTH = 10.0
DELTA_MAX_EXPANSIONS = 60
DELTA_TOL = 1e-10

_INVERT_MAX_ITER = 200


def kernel_name() -> str:
    return "python"


def norm_cdf(x: float) -> float:
    """Standard normal CDF via erfc (no cancellation in either tail)."""
    return 0.5 * math.erfc(-x / _SQRT2)


def norm_sf(x: float) -> float:
    """Standard normal survival function 1 - Phi(x)."""
    return 0.5 * math.erfc(x / _SQRT2)


def _beta_cf(x: float, a: float, b: float) -> float:
    """Modified Lentz continued fraction for the incomplete beta integral."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _CF_TINY:
        d = _CF_TINY
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        step = d * c
        h *= step
        if abs(step - 1.0) < _CF_EPS:
            return h
    return math.nan


def betainc(x: float, a: float, b: float) -> float:
    """Regularized incomplete beta I_x(a, b); nan if the fraction stalls."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_cf(x, a, b) / a
    return 1.0 - front * _beta_cf(1.0 - x, b, a) / b


def central_t_cdf(x: float, df: float) -> float:
    if x == 0.0:
        return 0.5
    w = df / (df + x * x)
    tail = 0.5 * betainc(w, 0.5 * df, 0.5)
    return tail if x < 0.0 else 1.0 - tail


def _clamp01(v: float) -> float:
    if v != v:  # nan passes through as the failure signal
        return v
    if v < 0.0:
        return 0.0
    if v > 1.0:
        return 1.0
    return v


def _nct_right(t: float, df: float, delta: float) -> float:
    """Noncentral-t CDF for t >= 0.

    Series over half-integer-shifted regularized incomplete beta terms,
    started at the dominant index floor(delta^2 / 2) so the leading weights
    never underflow, then swept forward and backward with term recurrences.
    """
    base = norm_sf(delta)  # Phi(-delta), the t == 0 boundary value
    if t == 0.0:
        return base
    y = t * t / (t * t + df)
    b = 0.5 * df
    lam = 0.5 * delta * delta
    k = int(lam)

    log_lam = math.log(lam) if lam > 0.0 else 0.0
    # Poisson-style weights at the start index:
    #   p_j = exp(-lam) lam^j / j!
    #   q_j = delta/sqrt(2) * exp(-lam) lam^j / Gamma(j + 3/2)
    p0 = math.exp(-lam + k * log_lam - math.lgamma(k + 1.0))
    q0 = (delta / _SQRT2) * math.exp(-lam + k * log_lam - math.lgamma(k + 1.5))

    ly = math.log(y)
    l1my = math.log1p(-y)
    lgb = math.lgamma(b)
    ap = k + 0.5
    aq = k + 1.0
    ibp0 = betainc(y, ap, b)
    ibq0 = betainc(y, aq, b)
    # T(a, b) = Gamma(a+b)/(Gamma(a+1) Gamma(b)) y^a (1-y)^b drives the
    # forward/backward recurrences I_y(a+1,b) = I_y(a,b) - T(a,b)
    tp0 = math.exp(math.lgamma(ap + b) - math.lgamma(ap + 1.0) - lgb + ap * ly + b * l1my)
    tq0 = math.exp(math.lgamma(aq + b) - math.lgamma(aq + 1.0) - lgb + aq * ly + b * l1my)

    adelta = abs(delta)
    s = 0.0
    iters = 0

    # forward sweep: j = k, k+1, ...
    j = k
    pj, qj, ibp, ibq, tp, tq = p0, q0, ibp0, ibq0, tp0, tq0
    while True:
        iters += 1
        if iters > NCT_MAX_ITER:
            return math.nan
        s += 0.5 * (pj * ibp + qj * ibq)
        ibp_next = ibp - tp
        if ibp_next < 0.0:
            ibp_next = 0.0
        ibq_next = ibq - tq
        if ibq_next < 0.0:
            ibq_next = 0.0
        # past the mode the Poisson tail is geometrically dominated:
        # sum_{i>j} p_i <= p_{j+1} / (1 - lam/(j+2)); the beta factors
        # decrease in j and |q_i| <= |delta| p_i
        p_next = pj * lam / (j + 1.0)
        tail_p = p_next / (1.0 - lam / (j + 2.0))
        if 0.5 * (1.0 + adelta) * ibp_next * tail_p < NCT_TOL:
            break
        a = j + 0.5
        tp *= y * (a + b) / (a + 1.0)
        a = j + 1.0
        tq *= y * (a + b) / (a + 1.0)
        pj = p_next
        qj *= lam / (j + 1.5)
        ibp, ibq = ibp_next, ibq_next
        j += 1

    # backward sweep: j = k-1 down to 0 (decaying Poisson tail below the mode)
    if k > 0:
        j = k - 1
        pj = p0 * k / lam
        qj = q0 * (k + 0.5) / lam
        tp = tp0 * (k + 0.5) / (y * (k - 0.5 + b))
        tq = tq0 * (k + 1.0) / (y * (k + b))
        ibp = ibp0 + tp
        if ibp > 1.0:
            ibp = 1.0
        ibq = ibq0 + tq
        if ibq > 1.0:
            ibq = 1.0
        while True:
            iters += 1
            if iters > NCT_MAX_ITER:
                return math.nan
            s += 0.5 * (pj * ibp + qj * ibq)
            # below the mode p_i increases in i, so the rest is <= j * p_j
            if j == 0 or pj * (1.0 + adelta) * j < NCT_TOL:
                break
            tp *= (j + 0.5) / (y * (j - 0.5 + b))
            tq *= (j + 1.0) / (y * (j + b))
            ibp += tp
            if ibp > 1.0:
                ibp = 1.0
            ibq += tq
            if ibq > 1.0:
                ibq = 1.0
            pj *= j / lam
            qj *= (j + 0.5) / lam
            j -= 1

    return base + s


def noncentral_t_cdf(x: float, df: float, delta: float) -> float:
    """CDF of the noncentral t distribution.

    Negative arguments go through the reflection
    F(x; df, delta) = 1 - F(-x; df, -delta), which keeps the series in its
    convergent regime.
    """
    if x < 0.0:
        r = _nct_right(-x, df, -delta)
        return _clamp01(1.0 - r)
    return _clamp01(_nct_right(x, df, delta))


def solve_noncentrality(q: float, df: float, target: float) -> float:
    """Solve F(q; df, delta) = target for delta.

    The CDF is strictly decreasing in delta, so the root is unique.  The
    bracket starts at q +/- 10 and doubles its half-width until the target is
    straddled, then plain bisection runs down to DELTA_TOL.
    """
    half = DELTA_HALF_WIDTH
    lo = q - half
    hi = q + half
    flo = noncentral_t_cdf(q, df, lo) - target
    fhi = noncentral_t_cdf(q, df, hi) - target
    if flo != flo or fhi != fhi:
        return math.nan
    k = 0
    while flo < 0.0 or fhi > 0.0:
        k += 1
        if k > DELTA_MAX_EXPANSIONS:
            return math.nan
        half *= 2.0
        if flo < 0.0:
            lo = q - half
            flo = noncentral_t_cdf(q, df, lo) - target
            if flo != flo:
                return math.nan
        if fhi > 0.0:
            hi = q + half
            fhi = noncentral_t_cdf(q, df, hi) - target
            if fhi != fhi:
                return math.nan
    while hi - lo > DELTA_TOL:
        mid = 0.5 * (lo + hi)
        fm = noncentral_t_cdf(q, df, mid) - target
        if fm != fm:
            return math.nan
        if fm >= 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _invert_cdf(f, p: float) -> float:
    """Solve f(x) = p for a monotone increasing CDF.

    Bracket by doubling outward from [-1, 1], then bisection interleaved
    with secant steps until the bracket collapses to machine width.
    """
    lo, hi = -1.0, 1.0
    flo = f(lo) - p
    fhi = f(hi) - p
    k = 0
    while flo > 0.0:
        k += 1
        if k > DELTA_MAX_EXPANSIONS:
            return math.nan
        lo *= 2.0
        flo = f(lo) - p
    k = 0
    while fhi < 0.0:
        k += 1
        if k > DELTA_MAX_EXPANSIONS:
            return math.nan
        hi *= 2.0
        fhi = f(hi) - p
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    xp, fp = lo, flo
    x, fx = hi, fhi
    for it in range(_INVERT_MAX_ITER):
        if hi - lo <= _EPS * (abs(lo) + abs(hi) + 1.0):
            break
        cand = math.nan
        if it % 2 == 0 and fx != fp:
            cand = x - fx * (x - xp) / (fx - fp)
        if not (lo < cand < hi):  # also catches nan; fall back to bisection
            cand = 0.5 * (lo + hi)
        fc = f(cand) - p
        xp, fp = x, fx
        x, fx = cand, fc
        if fc == 0.0:
            return cand
        if fc < 0.0:
            lo, flo = cand, fc
        else:
            hi, fhi = cand, fc
    return 0.5 * (lo + hi)


def norm_quantile(p: float) -> float:
    return _invert_cdf(norm_cdf, p)


def central_t_quantile(p: float, df: float) -> float:
    return _invert_cdf(lambda t: central_t_cdf(t, df), p)


def norm_quantile_array(p) -> np.ndarray:
    """Elementwise standard normal quantile of a 1-d probability array."""
    arr = np.asarray(p, dtype=np.float64)
    out = np.empty_like(arr)
    flat_in = arr.ravel()
    flat_out = out.ravel()
    for i in range(flat_in.shape[0]):
        flat_out[i] = norm_quantile(flat_in[i])
    return out
