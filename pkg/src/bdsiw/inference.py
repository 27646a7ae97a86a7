"""Maximum likelihood fitting, information criteria and likelihood-ratio tests.

Fits run in unconstrained coordinates ``logit(theta_i)`` and ``log(zeta)``
with multi-start Nelder-Mead. Starting points are one data-driven guess
followed by scrambled Sobol points over a box of plausible values.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple, Sequence

import numpy as np
from scipy.optimize import minimize
from scipy.special import expit, logit
from scipy.stats import qmc

from . import _backend
from .bivmax import BivMaxParams, PairObs
from .errors import NonConvergenceError
from .families import Family, make_family
from .special import chi2_sf

__all__ = [
    "PairedSample",
    "FitReport",
    "LrtReport",
    "InfoCriteria",
    "MODELS",
    "log_likelihood",
    "univariate_log_likelihood",
    "score_numeric",
    "fit_mle",
    "fit_univariate",
    "info_criteria",
    "lrt",
    "chi2_sf",
]

# model name -> (latent family tag, fixed shape or None)
MODELS = {
    "bdsiw": ("dsiw", None),
    "bdsie": ("dsiw", 1.0),
    "bdsir": ("dsiw", 2.0),
    "bdsw": ("dsw", None),
    "bdse": ("dse", None),
    "bdsr": ("dsr", None),
}

_PENALTY = 1e300
_U_LIMIT = 30.0  # |logit theta| beyond this is numerically the boundary
_START_BOX = np.array([[-3.0, 3.0]] * 3 + [[math.log(0.25), math.log(6.0)]])

_NM_OPTIONS = {"xatol": 1e-7, "fatol": 1e-9, "maxiter": 40_000, "maxfev": 40_000, "adaptive": False}


@dataclass(frozen=True, eq=False)
class PairedSample:
    """Paired nonnegative integer observations ``(x1_j, x2_j)``."""

    x1: np.ndarray
    x2: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.x1)
        b = np.asarray(self.x2)
        if a.shape != b.shape or a.ndim != 1:
            raise ValueError("x1 and x2 must be 1-d sequences of equal length")
        if a.size < 1:
            raise ValueError("a paired sample needs at least one observation")
        for arr in (a, b):
            if not np.all(np.asarray(arr, dtype=float) == np.round(np.asarray(arr, dtype=float))):
                raise ValueError("observations must be integers")
        a = a.astype(np.int64)
        b = b.astype(np.int64)
        if np.any(a < 0) or np.any(b < 0):
            raise ValueError("observations must be nonnegative")
        a.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "x1", a)
        object.__setattr__(self, "x2", b)

    @classmethod
    def from_pairs(cls, pairs: Sequence) -> "PairedSample":
        pairs = [(p.x1, p.x2) if isinstance(p, PairObs) else tuple(p) for p in pairs]
        if not pairs:
            raise ValueError("a paired sample needs at least one observation")
        a, b = zip(*pairs)
        return cls(np.array(a), np.array(b))

    def __len__(self):
        return int(self.x1.size)

    def __iter__(self):
        return (PairObs(int(a), int(b)) for a, b in zip(self.x1, self.x2))

    def __eq__(self, other):
        if not isinstance(other, PairedSample):
            return NotImplemented
        return np.array_equal(self.x1, other.x1) and np.array_equal(self.x2, other.x2)

    @property
    def observations(self) -> list[PairObs]:
        return list(self)

    @property
    def n(self) -> int:
        return len(self)

    @property
    def n1(self) -> int:
        """Number of pairs with ``x1 < x2``."""
        return int(np.sum(self.x1 < self.x2))

    @property
    def n2(self) -> int:
        """Number of pairs with ``x2 < x1``."""
        return int(np.sum(self.x2 < self.x1))

    @property
    def n3(self) -> int:
        """Number of ties."""
        return int(np.sum(self.x1 == self.x2))

    @property
    def minimum(self) -> np.ndarray:
        return np.minimum(self.x1, self.x2)

    @cached_property
    def compressed(self):
        """Distinct pairs and their multiplicities, as kernel-ready arrays."""
        rows, counts = np.unique(np.column_stack([self.x1, self.x2]), axis=0, return_counts=True)
        return (
            np.ascontiguousarray(rows[:, 0], dtype=np.int64),
            np.ascontiguousarray(rows[:, 1], dtype=np.int64),
            counts.astype(float),
        )


def _compress(xs):
    vals, counts = np.unique(np.asarray(xs, dtype=np.int64), return_counts=True)
    return np.ascontiguousarray(vals), counts.astype(float)


class InfoCriteria(NamedTuple):
    aic: float
    caic: float
    bic: float
    hqic: float


@dataclass
class FitReport:
    """Result of a maximum-likelihood fit.

    ``params`` is a :class:`~bdsiw.bivmax.BivMaxParams` for bivariate fits and
    a :class:`~bdsiw.families.Family` for univariate ones.
    """

    model: str
    params: object
    neg_log_lik: float
    k: int
    n: int
    aic: float
    caic: float
    bic: float
    hqic: float
    converged: bool
    iterations: int
    n_starts: int
    fixed_shape: float | None = None
    start_values: list = field(default_factory=list, repr=False)

    @property
    def log_lik(self) -> float:
        return -self.neg_log_lik

    def estimates(self) -> dict[str, float]:
        """Free and fixed parameter values keyed by name."""
        p = self.params
        if isinstance(p, BivMaxParams):
            return {"theta1": p.theta1, "theta2": p.theta2, "theta3": p.theta3, "zeta": p.zeta}
        return {"theta": p.theta, "zeta": p.zeta}


class LrtReport(NamedTuple):
    """Likelihood-ratio statistic, degrees of freedom and chi-square p-value."""

    lam: float
    df: int
    p_value: float


def info_criteria(neg_log_lik: float, k: int, n: int) -> InfoCriteria:
    """AIC, corrected AIC (reported as CAIC), BIC and HQIC.

    ``CAIC = AIC + 2k(k+1)/(n-k-1)``; it is NaN (with a warning) when
    ``n <= k + 1``.
    """
    aic = 2.0 * k + 2.0 * neg_log_lik
    if n > k + 1:
        caic = aic + 2.0 * k * (k + 1) / (n - k - 1)
    else:
        warnings.warn(f"CAIC undefined for n={n}, k={k} (needs n > k + 1)", RuntimeWarning, stacklevel=2)
        caic = math.nan
    bic = 2.0 * neg_log_lik + k * math.log(n)
    hqic = 2.0 * neg_log_lik + (2.0 * k * math.log(math.log(n)) if k else 0.0)
    return InfoCriteria(aic, caic, bic, hqic)


# ---------------------------------------------------------------------------
# likelihoods


def log_likelihood(p: BivMaxParams, data: PairedSample, backend=None) -> float:
    """Sum of log joint probabilities; ``-inf`` when an observation has zero mass."""
    x1, x2, w = data.compressed
    lt1, lt2, lt3 = p.log_thetas
    return _backend.get_kernels(backend).pair_loglik(x1, x2, w, lt1, lt2, lt3, p.zeta, p.kernel_model)


def univariate_log_likelihood(family: Family, xs, backend=None) -> float:
    vals, w = _compress(xs)
    code = _backend.MAX_DSIW if family.tag == "dsiw" else _backend.MIN_DSW
    return _backend.get_kernels(backend).uni_loglik(vals, w, family.log_theta, family.zeta, code)


# ---------------------------------------------------------------------------
# coordinates


def _resolve_model(family: str, fixed_shape):
    name = family.lower()
    if name in MODELS:
        tag, fixed = MODELS[name]
    elif name in ("dsiw", "dsw", "dse", "dsr"):
        tag, fixed = name, None
    else:
        raise ValueError(f"unknown model {family!r}; expected one of {sorted(MODELS)}")
    if fixed_shape is not None:
        if tag in ("dse", "dsr"):
            raise ValueError(f"{family!r} already has a fixed shape")
        fixed = float(fixed_shape)
    free_shape = fixed is None and tag not in ("dse", "dsr")
    return tag, fixed, free_shape


def _model_name(tag, fixed):
    for name, spec in MODELS.items():
        if spec == (tag, fixed):
            return name
    return f"b{tag}" if fixed is None else f"b{tag}[zeta={fixed:g}]"


def _params_from_u(u, tag, fixed, free_shape):
    thetas = expit(u[:3])
    if free_shape:
        zeta = math.exp(u[3])
    else:
        zeta = fixed if fixed is not None else 1.0
    return BivMaxParams(float(thetas[0]), float(thetas[1]), float(thetas[2]), zeta, tag)


def _u_from_params(p: BivMaxParams, free_shape):
    u = list(logit(np.array(p.thetas)))
    if free_shape:
        u.append(math.log(p.zeta))
    return np.array(u)


def _heuristic_start(data: PairedSample, construction: str):
    """Moment-style starting point from frequencies of zeros (or nonzeros).

    Under the max model ``P[X1=0] = t1 t3``, ``P[X2=0] = t2 t3`` and
    ``P[X1=0, X2=0] = t1 t2 t3``; under the min model the same holds for the
    events ``X_d >= 1``.
    """
    n = data.n
    if construction == "max":
        e1, e2 = data.x1 == 0, data.x2 == 0
    else:
        e1, e2 = data.x1 >= 1, data.x2 >= 1
    p1 = (e1.sum() + 0.5) / (n + 1.0)
    p2 = (e2.sum() + 0.5) / (n + 1.0)
    p12 = ((e1 & e2).sum() + 0.5) / (n + 1.0)
    t3 = float(np.clip(p1 * p2 / p12, 0.05, 0.95))
    t1 = float(np.clip(p1 / t3, 0.05, 0.95))
    t2 = float(np.clip(p2 / t3, 0.05, 0.95))
    lt = math.log(t1 * t2 * t3)
    # shape from one more point of the distribution of max (or min) of the pair
    zeta = 1.0
    if construction == "max":
        m = np.maximum(data.x1, data.x2)
        x = max(1, int(np.median(m)))
        level = (np.sum(m <= x) + 0.5) / (n + 1.0)
        ratio = math.log(level) / lt  # equals (x+1)^-zeta
        if 0.0 < ratio < 1.0:
            zeta = -math.log(ratio) / math.log(x + 1.0)
    else:
        m = np.minimum(data.x1, data.x2)
        x = max(1, int(np.median(m)))
        level = (np.sum(m > x) + 0.5) / (n + 1.0)
        ratio = math.log(level) / lt  # equals (x+1)^zeta
        if ratio > 1.0:
            zeta = math.log(ratio) / math.log(x + 1.0)
    zeta = float(np.clip(zeta, 0.25, 6.0))
    return t1, t2, t3, zeta


def _sobol_starts(count, dim, seed):
    if count <= 0:
        return []
    sampler = qmc.Sobol(d=dim, scramble=True, seed=seed)
    m = max(1, math.ceil(math.log2(count)))
    pts = sampler.random_base2(m)[:count]
    box = _START_BOX[:dim]
    return list(qmc.scale(pts, box[:, 0], box[:, 1]))


class _Run(NamedTuple):
    fun: float
    x: np.ndarray
    nit: int
    success: bool
    index: int


def _nm_options(tol):
    if tol is None:
        return _NM_OPTIONS
    if not tol > 0:
        raise ValueError("tol must be positive")
    return {**_NM_OPTIONS, "fatol": float(tol)}


def _nelder_mead(objective, x0, options=_NM_OPTIONS):
    x0 = np.asarray(x0, dtype=float)
    res = minimize(objective, x0, method="Nelder-Mead", options=options)
    nit = res.nit
    # restart from the optimum with a fresh simplex to rule out a collapsed one
    res2 = minimize(objective, res.x, method="Nelder-Mead", options=options)
    nit += res2.nit
    best = res2 if res2.fun <= res.fun else res
    return best.fun, best.x, nit, bool(res.success and res2.success)


def _multistart(objective, starts, options=_NM_OPTIONS):
    runs = []
    for i, x0 in enumerate(starts):
        fun, x, nit, ok = _nelder_mead(objective, x0, options)
        ok = ok and fun < _PENALTY and np.all(np.abs(x[:3]) < _U_LIMIT)
        runs.append(_Run(float(fun), x, nit, ok, i))
    # best objective, ties broken by lowest start index
    converged = [r for r in runs if r.success]
    pool = converged or runs
    return min(pool, key=lambda r: (r.fun, r.index)), bool(converged)


def fit_mle(
    data: PairedSample,
    family: str = "bdsiw",
    fixed_shape: float | None = None,
    n_starts: int = 8,
    seed: int = 0,
    initial: Sequence[BivMaxParams] = (),
    backend=None,
    tol: float | None = None,
) -> FitReport:
    """Maximum-likelihood fit of a bivariate model.

    Parameters
    ----------
    data : PairedSample
        Observed pairs.
    family : str
        Model name (``bdsiw``, ``bdsie``, ``bdsir``, ``bdsw``, ``bdse``,
        ``bdsr``) or a latent family tag.
    fixed_shape : float, optional
        Hold ``zeta`` at this value (``1`` gives BDsIE, ``2`` BDsIR).
    n_starts : int
        Number of generated starting points (one heuristic, rest Sobol).
    seed : int
        Seed for the Sobol scrambling.
    initial : sequence of BivMaxParams
        Extra starting points tried before the generated ones.
    tol : float, optional
        Absolute tolerance on the objective for the simplex search.

    Raises
    ------
    NonConvergenceError
        If no start converges; ``err.best`` carries the best point found.
    """
    tag, fixed, free_shape = _resolve_model(family, fixed_shape)
    if data.n < 4:
        warnings.warn("fewer than 4 observations; estimates will be unstable", RuntimeWarning, stacklevel=2)
    if np.unique(np.column_stack([data.x1, data.x2]), axis=0).shape[0] == 1:
        warnings.warn("all pairs are identical; the fit is likely to run to the boundary", RuntimeWarning, stacklevel=2)
    if n_starts < 1 and not initial:
        raise ValueError("need at least one starting point")

    x1, x2, w = data.compressed
    kern = _backend.get_kernels(backend)
    model = _backend.MAX_DSIW if tag == "dsiw" else _backend.MIN_DSW
    fixed_zeta = fixed if fixed is not None else (2.0 if tag == "dsr" else 1.0)

    def objective(u):
        if np.any(np.abs(u[:3]) > _U_LIMIT) or (free_shape and abs(u[3]) > 5.0):
            return _PENALTY
        lt = -np.logaddexp(0.0, -u[:3])  # log(expit(u)) without underflow
        zeta = math.exp(u[3]) if free_shape else fixed_zeta
        ll = kern.pair_loglik(x1, x2, w, lt[0], lt[1], lt[2], zeta, model)
        return -ll if ll > -math.inf else _PENALTY

    dim = 4 if free_shape else 3
    construction = "max" if tag == "dsiw" else "min"
    starts = [_u_from_params(BivMaxParams(*p.thetas, p.zeta, tag), free_shape) for p in initial]
    if n_starts >= 1:
        h = _heuristic_start(data, construction)
        starts.append(_u_from_params(BivMaxParams(*h, tag), free_shape))
        starts.extend(_sobol_starts(n_starts - 1, dim, seed))

    best, any_converged = _multistart(objective, starts, _nm_options(tol))
    params = _params_from_u(best.x, tag, fixed, free_shape)
    k = dim
    nll = best.fun if best.fun < _PENALTY else math.inf
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        crit = info_criteria(nll, k, data.n)
    report = FitReport(
        model=_model_name(tag, fixed),
        params=params,
        neg_log_lik=nll,
        k=k,
        n=data.n,
        aic=crit.aic,
        caic=crit.caic,
        bic=crit.bic,
        hqic=crit.hqic,
        converged=any_converged,
        iterations=best.nit,
        n_starts=len(starts),
        fixed_shape=fixed,
        start_values=starts,
    )
    if not any_converged:
        raise NonConvergenceError(f"no start converged for model {report.model}", best=report)
    return report


def fit_univariate(
    xs,
    family: str = "dsiw",
    n_starts: int = 4,
    seed: int = 0,
    backend=None,
    tol: float | None = None,
) -> FitReport:
    """Maximum-likelihood fit of a univariate family to nonnegative integers."""
    xs = np.asarray(xs)
    if xs.size == 0:
        raise ValueError("need at least one observation")
    if np.any(xs < 0) or not np.all(xs == np.round(xs)):
        raise ValueError("observations must be nonnegative integers")
    tag = family.lower()
    proto = {"dsiw": "dsiw", "dsw": "dsw", "dse": "dsw", "dsr": "dsw"}.get(tag)
    if proto is None:
        raise ValueError(f"unknown family {family!r}")
    free_shape = tag in ("dsiw", "dsw")
    fixed_zeta = {"dse": 1.0, "dsr": 2.0}.get(tag, 1.0)
    vals, w = _compress(xs)
    kern = _backend.get_kernels(backend)
    code = _backend.MAX_DSIW if proto == "dsiw" else _backend.MIN_DSW

    def objective(u):
        if abs(u[0]) > _U_LIMIT or (free_shape and abs(u[1]) > 5.0):
            return _PENALTY
        lt = -np.logaddexp(0.0, -u[0])
        zeta = math.exp(u[1]) if free_shape else fixed_zeta
        ll = kern.uni_loglik(vals, w, lt, zeta, code)
        return -ll if ll > -math.inf else _PENALTY

    n = xs.size
    # P[X = 0] = theta for DsIW; P[X >= 1] = theta for DsW
    hits = np.sum(xs == 0) if proto == "dsiw" else np.sum(xs >= 1)
    theta0 = float(np.clip((hits + 0.5) / (n + 1.0), 0.05, 0.95))
    dim = 2 if free_shape else 1
    starts = [np.array([logit(theta0), 0.0][:dim])]
    box = np.array([[-3.0, 3.0], [math.log(0.25), math.log(6.0)]])[:dim]
    if n_starts > 1:
        sampler = qmc.Sobol(d=dim, scramble=True, seed=seed)
        pts = sampler.random_base2(max(1, math.ceil(math.log2(n_starts - 1))))[: n_starts - 1]
        starts.extend(qmc.scale(pts, box[:, 0], box[:, 1]))

    options = _nm_options(tol)
    runs = []
    for i, x0 in enumerate(starts):
        fun, x, nit, ok = _nelder_mead(objective, x0, options)
        runs.append(_Run(float(fun), x, nit, ok and fun < _PENALTY, i))
    converged = [r for r in runs if r.success]
    best = min(converged or runs, key=lambda r: (r.fun, r.index))
    theta = float(expit(best.x[0]))
    fam = make_family(tag, theta, math.exp(best.x[1]) if free_shape else None)
    nll = best.fun if best.fun < _PENALTY else math.inf
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        crit = info_criteria(nll, dim, n)
    report = FitReport(
        model=tag,
        params=fam,
        neg_log_lik=nll,
        k=dim,
        n=int(n),
        aic=crit.aic,
        caic=crit.caic,
        bic=crit.bic,
        hqic=crit.hqic,
        converged=bool(converged),
        iterations=best.nit,
        n_starts=len(starts),
        fixed_shape=None if free_shape else fixed_zeta,
    )
    if not converged:
        raise NonConvergenceError(f"no start converged for family {tag}", best=report)
    return report


# ---------------------------------------------------------------------------
# score and tests


def score_numeric(
    p: BivMaxParams,
    data: PairedSample,
    h: float = 1e-6,
    coords: str = "transformed",
    fix_shape: bool = False,
    backend=None,
) -> np.ndarray:
    """Central-difference gradient of the log-likelihood.

    In ``"transformed"`` coordinates the components are derivatives with
    respect to ``logit(theta_i)`` and ``log(zeta)``; in ``"natural"``
    coordinates with respect to ``theta_i`` and ``zeta``. The shape component
    is omitted for fixed-shape families and when ``fix_shape`` is set. The
    step for each coordinate is ``h * max(1, |value|)``; it is halved (with a
    warning) while a probe leaves the parameter space or hits a
    zero-probability observation.
    """
    if coords not in ("transformed", "natural"):
        raise ValueError("coords must be 'transformed' or 'natural'")
    free_shape = p.family in ("dsiw", "dsw") and not fix_shape
    if coords == "transformed":
        base = _u_from_params(p, free_shape)

        def build(v):
            return _params_from_u(v, p.family, None if free_shape else p.zeta, free_shape)
    else:
        base = p.as_array() if free_shape else p.as_array()[:3]

        def build(v):
            zeta = v[3] if free_shape else p.zeta
            return BivMaxParams(v[0], v[1], v[2], zeta, p.family)

    def loglik(v):
        try:
            q = build(v)
        except ValueError:
            return -math.inf
        return log_likelihood(q, data, backend)

    grad = np.empty(base.size)
    for i in range(base.size):
        step = h * max(1.0, abs(base[i]))
        for _ in range(40):
            e = np.zeros_like(base)
            e[i] = step
            up, down = loglik(base + e), loglik(base - e)
            if math.isfinite(up) and math.isfinite(down):
                break
            step *= 0.5
            warnings.warn(
                f"score step for coordinate {i} shrunk to {step:.3g} near the parameter boundary",
                RuntimeWarning,
                stacklevel=2,
            )
        else:
            raise ValueError("cannot take a finite-difference step inside the parameter space")
        grad[i] = (up - down) / (2.0 * step)
    return grad


def lrt(full: FitReport, restricted: FitReport, df: int | None = None) -> LrtReport:
    """Likelihood-ratio test of a restricted model nested in ``full``.

    Nesting is the caller's responsibility. ``df`` defaults to the difference
    in free-parameter counts. A slightly negative statistic (optimizer noise)
    is clamped to zero with a warning.
    """
    if df is None:
        df = full.k - restricted.k
    if df < 1:
        raise ValueError("degrees of freedom must be positive")
    lam = 2.0 * (restricted.neg_log_lik - full.neg_log_lik)
    if lam < 0.0:
        warnings.warn(f"negative LRT statistic {lam:.3g} clamped to 0", RuntimeWarning, stacklevel=2)
        lam = 0.0
    return LrtReport(lam, int(df), chi2_sf(lam, int(df)))
