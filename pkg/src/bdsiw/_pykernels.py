"""Pure numpy log-likelihood kernels (fallback for ``_ckernels``).

Joint probabilities are assembled from latent-variable events so every term
is a product of nonnegative factors; differencing the joint CDF loses all
precision once observations sit far in the polynomial tail.

Max model, ``X_d = max(W_d, W_3)`` with DsIW latents::

    x1 < x2 :  P[max(W1, W3) = x1] * P[W2 = x2]
    x2 < x1 :  P[W1 = x1] * P[max(W2, W3) = x2]
    x1 = x2 :  P[W3 = x] P[W1 <= x] P[W2 <= x] + P[W3 < x] P[W1 = x] P[W2 = x]

Min model, ``X_d = min(W_d, W_3)`` with DsW latents, is the mirror image with
survival functions in place of CDFs.
"""

import numpy as np

MAX_DSIW = 0
MIN_DSW = 1


def _dsiw_cdf(x, lt, z):
    out = np.zeros_like(x)
    pos = x >= 0
    out[pos] = np.exp(lt * np.exp(-z * np.log1p(x[pos])))
    return out


def _dsiw_pmf(x, lt, z):
    out = np.zeros_like(x)
    out[x == 0] = np.exp(lt)
    pos = x > 0
    xs = x[pos]
    step = np.exp(-z * np.log(xs)) * -np.expm1(-z * np.log1p(1.0 / xs))
    out[pos] = np.exp(lt * np.exp(-z * np.log1p(xs))) * -np.expm1(lt * step)
    return out


def _dsw_sf(x, lt, z):
    out = np.ones_like(x)
    pos = x >= 0
    out[pos] = np.exp(lt * np.exp(z * np.log1p(x[pos])))
    return out


def _dsw_pmf(x, lt, z):
    out = np.zeros_like(x)
    out[x == 0] = -np.expm1(lt)
    pos = x > 0
    xs = x[pos]
    step = np.exp(z * np.log(xs)) * np.expm1(z * np.log1p(1.0 / xs))
    out[pos] = np.exp(lt * np.exp(z * np.log(xs))) * -np.expm1(lt * step)
    return out


def pair_prob_array(x1, x2, lt1, lt2, lt3, zeta, model):
    x = np.asarray(x1, dtype=float)
    y = np.asarray(x2, dtype=float)
    lo = x < y
    hi = y < x
    tie = ~(lo | hi)
    out = np.zeros_like(x)
    if model == MAX_DSIW:
        out[lo] = _dsiw_pmf(x[lo], lt1 + lt3, zeta) * _dsiw_pmf(y[lo], lt2, zeta)
        out[hi] = _dsiw_pmf(x[hi], lt1, zeta) * _dsiw_pmf(y[hi], lt2 + lt3, zeta)
        t = x[tie]
        out[tie] = _dsiw_pmf(t, lt3, zeta) * _dsiw_cdf(t, lt1 + lt2, zeta) + _dsiw_cdf(
            t - 1, lt3, zeta
        ) * _dsiw_pmf(t, lt1, zeta) * _dsiw_pmf(t, lt2, zeta)
    else:
        out[lo] = _dsw_pmf(x[lo], lt1, zeta) * _dsw_pmf(y[lo], lt2 + lt3, zeta)
        out[hi] = _dsw_pmf(x[hi], lt1 + lt3, zeta) * _dsw_pmf(y[hi], lt2, zeta)
        t = x[tie]
        out[tie] = _dsw_pmf(t, lt3, zeta) * _dsw_sf(t - 1, lt1 + lt2, zeta) + _dsw_sf(
            t, lt3, zeta
        ) * _dsw_pmf(t, lt1, zeta) * _dsw_pmf(t, lt2, zeta)
    out[(x < 0) | (y < 0)] = 0.0
    return out


def pair_loglik(x1, x2, weight, lt1, lt2, lt3, zeta, model):
    p = pair_prob_array(x1, x2, lt1, lt2, lt3, zeta, model)
    if not np.all(p > 0.0):
        return -np.inf
    return float(np.dot(weight, np.log(p)))


def uni_loglik(xs, weight, lt, zeta, family):
    x = np.asarray(xs, dtype=float)
    p = _dsiw_pmf(x, lt, zeta) if family == MAX_DSIW else _dsw_pmf(x, lt, zeta)
    if not np.all(p > 0.0):
        return -np.inf
    return float(np.dot(weight, np.log(p)))
