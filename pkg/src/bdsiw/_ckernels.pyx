# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled log-likelihood kernels.

Mirrors ``bdsiw._pykernels`` function for function; see there for the
probability decompositions used.
"""

from libc.math cimport exp, expm1, log, log1p, INFINITY

# model codes shared with the Python side
cdef enum:
    MAX_DSIW = 0
    MIN_DSW = 1


cdef inline double dsiw_cdf(double x, double lt, double z) nogil:
    if x < 0:
        return 0.0
    return exp(lt * exp(-z * log1p(x)))


cdef inline double dsiw_pmf(double x, double lt, double z) nogil:
    cdef double step
    if x < 0:
        return 0.0
    if x == 0:
        return exp(lt)
    step = exp(-z * log(x)) * -expm1(-z * log1p(1.0 / x))
    return exp(lt * exp(-z * log1p(x))) * -expm1(lt * step)


cdef inline double dsw_sf(double x, double lt, double z) nogil:
    # P[W > x]
    if x < 0:
        return 1.0
    return exp(lt * exp(z * log1p(x)))


cdef inline double dsw_pmf(double x, double lt, double z) nogil:
    cdef double step
    if x < 0:
        return 0.0
    if x == 0:
        return -expm1(lt)
    step = exp(z * log(x)) * expm1(z * log1p(1.0 / x))
    return exp(lt * exp(z * log(x))) * -expm1(lt * step)


cdef inline double pair_prob(long long a, long long b, double lt1, double lt2,
                             double lt3, double z, int model) nogil:
    cdef double x = <double>a
    cdef double y = <double>b
    if a < 0 or b < 0:
        return 0.0
    if model == MAX_DSIW:
        if a < b:
            return dsiw_pmf(x, lt1 + lt3, z) * dsiw_pmf(y, lt2, z)
        if b < a:
            return dsiw_pmf(x, lt1, z) * dsiw_pmf(y, lt2 + lt3, z)
        return (dsiw_pmf(x, lt3, z) * dsiw_cdf(x, lt1 + lt2, z)
                + dsiw_cdf(x - 1, lt3, z) * dsiw_pmf(x, lt1, z) * dsiw_pmf(x, lt2, z))
    else:
        if a < b:
            return dsw_pmf(x, lt1, z) * dsw_pmf(y, lt2 + lt3, z)
        if b < a:
            return dsw_pmf(x, lt1 + lt3, z) * dsw_pmf(y, lt2, z)
        return (dsw_pmf(x, lt3, z) * dsw_sf(x - 1, lt1 + lt2, z)
                + dsw_sf(x, lt3, z) * dsw_pmf(x, lt1, z) * dsw_pmf(x, lt2, z))


def pair_loglik(const long long[::1] x1, const long long[::1] x2,
                const double[::1] weight, double lt1, double lt2, double lt3,
                double zeta, int model):
    """Weighted sum of log joint probabilities; ``-inf`` if any is zero."""
    cdef Py_ssize_t i, n = x1.shape[0]
    cdef double p, total = 0.0
    with nogil:
        for i in range(n):
            p = pair_prob(x1[i], x2[i], lt1, lt2, lt3, zeta, model)
            if not p > 0.0:
                total = -INFINITY
                break
            total += weight[i] * log(p)
    return total


def pair_prob_array(const long long[::1] x1, const long long[::1] x2,
                    double lt1, double lt2, double lt3, double zeta, int model):
    cdef Py_ssize_t i, n = x1.shape[0]
    out = [0.0] * n
    for i in range(n):
        out[i] = pair_prob(x1[i], x2[i], lt1, lt2, lt3, zeta, model)
    return out


def uni_loglik(const long long[::1] xs, const double[::1] weight,
               double lt, double zeta, int family):
    """Weighted univariate log-likelihood; family 0 is DsIW, 1 is DsW."""
    cdef Py_ssize_t i, n = xs.shape[0]
    cdef double p, total = 0.0
    with nogil:
        for i in range(n):
            if family == MAX_DSIW:
                p = dsiw_pmf(<double>xs[i], lt, zeta)
            else:
                p = dsw_pmf(<double>xs[i], lt, zeta)
            if not p > 0.0:
                total = -INFINITY
                break
            total += weight[i] * log(p)
    return total
