# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled scalar numerical kernel.

Cython twin of ``epci._pykernel``: same algorithms, same constants, same
nan-on-failure convention.  Keep the two modules in sync; the parity test
suite compares them point by point.
"""

from libc.math cimport NAN, erfc, exp, fabs, floor, lgamma, log, log1p, sqrt

import numpy as np

cdef double _SQRT2 = sqrt(2.0)
cdef double _EPS = 2.220446049250313e-16

cdef int _CF_MAX_ITER = 2000
cdef double _CF_TINY = 1e-300
cdef double _CF_EPS = 1e-16

cdef double _NCT_TOL = 1e-12
cdef int _NCT_MAX_ITER = 10000

cdef double _DELTA_HALF_WIDTH = 10.0
cdef int _DELTA_MAX_EXPANSIONS = 60
cdef double _DELTA_TOL = 1e-10

cdef int _INVERT_MAX_ITER = 200

# mirrored as Python attributes so both kernels introspect identically
NCT_TOL = _NCT_TOL
NCT_MAX_ITER = _NCT_MAX_ITER
DELTA_HALF_WIDTH = _DELTA_HALF_WIDTH
DELTA_MAX_EXPANSIONS = _DELTA_MAX_EXPANSIONS
DELTA_TOL = _DELTA_TOL


def kernel_name():
    return "c"


cdef inline double _norm_cdf(double x) noexcept nogil:
    return 0.5 * erfc(-x / _SQRT2)


cdef inline double _norm_sf(double x) noexcept nogil:
    return 0.5 * erfc(x / _SQRT2)


cdef double _beta_cf(double x, double a, double b) noexcept nogil:
    cdef double qab = a + b
    cdef double qap = a + 1.0
    cdef double qam = a - 1.0
    cdef double c = 1.0
    cdef double d = 1.0 - qab * x / qap
    cdef double h, aa, step
    cdef int m, m2
    if fabs(d) < _CF_TINY:
        d = _CF_TINY
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if fabs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if fabs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if fabs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if fabs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        step = d * c
        h *= step
        if fabs(step - 1.0) < _CF_EPS:
            return h
    return NAN


cdef double _betainc(double x, double a, double b) noexcept nogil:
    cdef double ln_front, front
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (lgamma(a + b) - lgamma(a) - lgamma(b)
                + a * log(x) + b * log1p(-x))
    front = exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_cf(x, a, b) / a
    return 1.0 - front * _beta_cf(1.0 - x, b, a) / b


cdef double _central_t_cdf(double x, double df) noexcept nogil:
    cdef double w, tail
    if x == 0.0:
        return 0.5
    w = df / (df + x * x)
    tail = 0.5 * _betainc(w, 0.5 * df, 0.5)
    return tail if x < 0.0 else 1.0 - tail


cdef inline double _clamp01(double v) noexcept nogil:
    if v != v:
        return v
    if v < 0.0:
        return 0.0
    if v > 1.0:
        return 1.0
    return v


cdef double _nct_right(double t, double df, double delta) noexcept nogil:
    # series over half-integer-shifted incomplete beta terms for t >= 0,
    # centred on the dominant Poisson index floor(delta^2/2)
    cdef double base = _norm_sf(delta)
    cdef double y, b, lam, log_lam, p0, q0, ly, l1my, lgb
    cdef double ap, aq, ibp0, ibq0, tp0, tq0, adelta, s
    cdef double pj, qj, ibp, ibq, tp, tq, ibp_next, ibq_next, a
    cdef double p_next, tail_p
    cdef long long k, j
    cdef int iters = 0

    if t == 0.0:
        return base
    y = t * t / (t * t + df)
    b = 0.5 * df
    lam = 0.5 * delta * delta
    k = <long long>floor(lam)

    log_lam = log(lam) if lam > 0.0 else 0.0
    p0 = exp(-lam + k * log_lam - lgamma(k + 1.0))
    q0 = (delta / _SQRT2) * exp(-lam + k * log_lam - lgamma(k + 1.5))

    ly = log(y)
    l1my = log1p(-y)
    lgb = lgamma(b)
    ap = k + 0.5
    aq = k + 1.0
    ibp0 = _betainc(y, ap, b)
    ibq0 = _betainc(y, aq, b)
    tp0 = exp(lgamma(ap + b) - lgamma(ap + 1.0) - lgb + ap * ly + b * l1my)
    tq0 = exp(lgamma(aq + b) - lgamma(aq + 1.0) - lgb + aq * ly + b * l1my)

    adelta = fabs(delta)
    s = 0.0

    j = k
    pj = p0
    qj = q0
    ibp = ibp0
    ibq = ibq0
    tp = tp0
    tq = tq0
    while True:
        iters += 1
        if iters > _NCT_MAX_ITER:
            return NAN
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
        if 0.5 * (1.0 + adelta) * ibp_next * tail_p < _NCT_TOL:
            break
        a = j + 0.5
        tp *= y * (a + b) / (a + 1.0)
        a = j + 1.0
        tq *= y * (a + b) / (a + 1.0)
        pj = p_next
        qj *= lam / (j + 1.5)
        ibp = ibp_next
        ibq = ibq_next
        j += 1

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
            if iters > _NCT_MAX_ITER:
                return NAN
            s += 0.5 * (pj * ibp + qj * ibq)
            if j == 0 or pj * (1.0 + adelta) * j < _NCT_TOL:
                break
            tp *= (j + 0.5) / (y * (j - 0.5 + b))
            tq *= (j + 1.0) / (y * (j + b))
            ibp += tp
            if ibp > 1.0:
                ibp = 1.0
            ibq += tq
            if ibq > 1.0:
                ibq = 1.0
            pj *= j / (<double>lam)
            qj *= (j + 0.5) / lam
            j -= 1

    return base + s


cdef double _noncentral_t_cdf(double x, double df, double delta) noexcept nogil:
    if x < 0.0:
        return _clamp01(1.0 - _nct_right(-x, df, -delta))
    return _clamp01(_nct_right(x, df, delta))


cdef double _solve_noncentrality(double q, double df, double target) noexcept nogil:
    cdef double half = _DELTA_HALF_WIDTH
    cdef double lo = q - half
    cdef double hi = q + half
    cdef double flo = _noncentral_t_cdf(q, df, lo) - target
    cdef double fhi = _noncentral_t_cdf(q, df, hi) - target
    cdef double mid, fm
    cdef int k = 0
    if flo != flo or fhi != fhi:
        return NAN
    while flo < 0.0 or fhi > 0.0:
        k += 1
        if k > _DELTA_MAX_EXPANSIONS:
            return NAN
        half *= 2.0
        if flo < 0.0:
            lo = q - half
            flo = _noncentral_t_cdf(q, df, lo) - target
            if flo != flo:
                return NAN
        if fhi > 0.0:
            hi = q + half
            fhi = _noncentral_t_cdf(q, df, hi) - target
            if fhi != fhi:
                return NAN
    while hi - lo > _DELTA_TOL:
        mid = 0.5 * (lo + hi)
        fm = _noncentral_t_cdf(q, df, mid) - target
        if fm != fm:
            return NAN
        if fm >= 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


cdef inline double _cdf_kind(int kind, double x, double df) noexcept nogil:
    if kind == 0:
        return _norm_cdf(x)
    return _central_t_cdf(x, df)


cdef double _invert_cdf(int kind, double df, double p) noexcept nogil:
    cdef double lo = -1.0
    cdef double hi = 1.0
    cdef double flo = _cdf_kind(kind, lo, df) - p
    cdef double fhi = _cdf_kind(kind, hi, df) - p
    cdef double xp, fp, x, fx, cand, fc
    cdef int k = 0
    cdef int it
    while flo > 0.0:
        k += 1
        if k > _DELTA_MAX_EXPANSIONS:
            return NAN
        lo *= 2.0
        flo = _cdf_kind(kind, lo, df) - p
    k = 0
    while fhi < 0.0:
        k += 1
        if k > _DELTA_MAX_EXPANSIONS:
            return NAN
        hi *= 2.0
        fhi = _cdf_kind(kind, hi, df) - p
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    xp = lo
    fp = flo
    x = hi
    fx = fhi
    for it in range(_INVERT_MAX_ITER):
        if hi - lo <= _EPS * (fabs(lo) + fabs(hi) + 1.0):
            break
        cand = NAN
        if it % 2 == 0 and fx != fp:
            cand = x - fx * (x - xp) / (fx - fp)
        if not (lo < cand and cand < hi):
            cand = 0.5 * (lo + hi)
        fc = _cdf_kind(kind, cand, df) - p
        xp = x
        fp = fx
        x = cand
        fx = fc
        if fc == 0.0:
            return cand
        if fc < 0.0:
            lo = cand
            flo = fc
        else:
            hi = cand
            fhi = fc
    return 0.5 * (lo + hi)


def norm_cdf(double x):
    return _norm_cdf(x)


def norm_sf(double x):
    return _norm_sf(x)


def norm_quantile(double p):
    return _invert_cdf(0, 0.0, p)


def betainc(double x, double a, double b):
    return _betainc(x, a, b)


def central_t_cdf(double x, double df):
    return _central_t_cdf(x, df)


def central_t_quantile(double p, double df):
    return _invert_cdf(1, df, p)


def noncentral_t_cdf(double x, double df, double delta):
    return _noncentral_t_cdf(x, df, delta)


def solve_noncentrality(double q, double df, double target):
    return _solve_noncentrality(q, df, target)


def norm_quantile_array(p):
    """Elementwise standard normal quantile of a 1-d probability array."""
    arr = np.ascontiguousarray(p, dtype=np.float64)
    out = np.empty(arr.shape, dtype=np.float64)
    cdef double[::1] pv = arr.ravel()
    cdef double[::1] ov = out.ravel()
    cdef Py_ssize_t i, n = pv.shape[0]
    with nogil:
        for i in range(n):
            ov[i] = _invert_cdf(0, 0.0, pv[i])
    return out
