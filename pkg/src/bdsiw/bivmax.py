"""Bivariate discrete lifetime models built from three independent latents.

The BDsIW model takes ``W_i ~ DsIW(theta_i, zeta)`` for ``i = 1, 2, 3`` and
sets ``X_d = max(W_d, W_3)``. Its joint CDF is the product

    F(x1, x2) = F_DsIW(x1; theta1) F_DsIW(x2; theta2) F_DsIW(min(x1, x2); theta3)

and each marginal is DsIW with scale ``theta_d * theta3``.

The same parameter record with a discrete-Weibull family tag (``dsw``,
``dse``, ``dsr``) gives the competitor models BDsW/BDsE/BDsR, which use the
dual construction ``X_d = min(W_d, W_3)``; there the joint *survival*
function is the product and the marginals are DsW with scale
``theta_d * theta3``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import integrate

from . import _backend
from .errors import UndefinedHazardError
from .families import DsIW, Family, make_family

__all__ = [
    "BivMaxParams",
    "PairObs",
    "GridCheck",
    "joint_cdf",
    "joint_sf",
    "joint_reliability",
    "marginal_family",
    "marginal_cdf",
    "marginal_pmf",
    "joint_pmf",
    "joint_pmf_latent",
    "joint_pmf_closed_form",
    "bhrf",
    "cond_hazard",
    "vector_hazard",
    "conditional_pmf",
    "conditional_cdf",
    "max_marginal",
    "stress_strength",
    "median_correlation",
    "pgf",
    "pqd_check",
    "tp2_check",
    "sample_pair",
    "sample_pairs",
]

COND_HAZARD_VARIANTS = ("r*1|2", "r*2|1", "r**1|2", "r**2|1")


@dataclass(frozen=True)
class BivMaxParams:
    """Parameter vector ``(theta1, theta2, theta3, zeta)`` plus latent family.

    Parameters
    ----------
    theta1, theta2, theta3 : float
        Latent scales, each in (0, 1).
    zeta : float
        Shape shared by the three latents. Ignored (fixed) for ``dse``/``dsr``.
    family : str
        Latent family tag. ``"dsiw"`` (default) gives the max construction;
        ``"dsw"``, ``"dse"``, ``"dsr"`` give the min construction.
    """

    theta1: float
    theta2: float
    theta3: float
    zeta: float
    family: str = "dsiw"

    def __post_init__(self):
        fam = self.family.lower()
        object.__setattr__(self, "family", fam)
        if fam == "dse":
            object.__setattr__(self, "zeta", 1.0)
        elif fam == "dsr":
            object.__setattr__(self, "zeta", 2.0)
        # constructing the latents validates every parameter
        self.latents

    @property
    def construction(self) -> str:
        return "max" if self.family == "dsiw" else "min"

    @property
    def thetas(self):
        return (self.theta1, self.theta2, self.theta3)

    @property
    def latents(self) -> tuple[Family, Family, Family]:
        return tuple(make_family(self.family, t, self.zeta) for t in self.thetas)

    @property
    def log_thetas(self):
        return tuple(math.log(t) for t in self.thetas)

    @property
    def kernel_model(self) -> int:
        return _backend.MAX_DSIW if self.construction == "max" else _backend.MIN_DSW

    def as_array(self) -> np.ndarray:
        return np.array([self.theta1, self.theta2, self.theta3, self.zeta])

    def swapped(self) -> "BivMaxParams":
        """Parameters of ``(X2, X1)``."""
        return BivMaxParams(self.theta2, self.theta1, self.theta3, self.zeta, self.family)


@dataclass(frozen=True)
class PairObs:
    """One observed pair of nonnegative integers."""

    x1: int
    x2: int

    def __post_init__(self):
        for v in (self.x1, self.x2):
            if int(v) != v or v < 0:
                raise ValueError(f"pair components must be nonnegative integers, got {v!r}")
        object.__setattr__(self, "x1", int(self.x1))
        object.__setattr__(self, "x2", int(self.x2))

    @property
    def x3(self) -> int:
        return min(self.x1, self.x2)


class GridCheck(NamedTuple):
    holds: bool
    worst: float
    where: tuple


def _prep(x1, x2):
    scalar = np.ndim(x1) == 0 and np.ndim(x2) == 0
    a, b = np.broadcast_arrays(np.asarray(x1, dtype=float), np.asarray(x2, dtype=float))
    return scalar, a, b


def _out(scalar, arr):
    return float(arr) if scalar else arr


def _between(fam: Family, lo, hi):
    """P[lo < W <= hi] for a latent W, accurate in both tails."""
    c_lo, c_hi = fam.cdf(lo), fam.cdf(hi)
    s_lo, s_hi = fam.sf(lo), fam.sf(hi)
    return np.where(c_lo > 0.5, s_lo - s_hi, c_hi - c_lo)


# ---------------------------------------------------------------------------
# distribution functions


def joint_cdf(p: BivMaxParams, x1, x2):
    """P[X1 <= x1, X2 <= x2]."""
    scalar, a, b = _prep(x1, x2)
    w1, w2, w3 = p.latents
    lo = np.minimum(a, b)
    if p.construction == "max":
        out = w1.cdf(a) * w2.cdf(b) * w3.cdf(lo)
    else:
        hi = np.maximum(a, b)
        side = np.where(a <= b, w1.cdf(a), w2.cdf(b))
        out = w3.cdf(lo) + _between(w3, lo, hi) * side + w3.sf(hi) * w1.cdf(a) * w2.cdf(b)
        out = np.where(lo < 0, 0.0, out)
    return _out(scalar, out)


def joint_sf(p: BivMaxParams, x1, x2):
    """P[X1 > x1, X2 > x2], computed as a sum of nonnegative latent events."""
    scalar, a, b = _prep(x1, x2)
    w1, w2, w3 = p.latents
    hi = np.maximum(a, b)
    if p.construction == "max":
        lo = np.minimum(a, b)
        # W3 > hi; lo < W3 <= hi with the other latent above its threshold;
        # W3 <= lo with both individual latents above their thresholds.
        side = np.where(a <= b, w2.sf(b), w1.sf(a))
        out = w3.sf(hi) + _between(w3, lo, hi) * side + w3.cdf(lo) * w1.sf(a) * w2.sf(b)
    else:
        out = w1.sf(a) * w2.sf(b) * w3.sf(hi)
    return _out(scalar, out)


joint_reliability = joint_sf


def marginal_family(p: BivMaxParams, which: int) -> Family:
    """Distribution of ``X_which``: same family with scale ``theta_which * theta3``."""
    if which not in (1, 2):
        raise ValueError("which must be 1 or 2")
    td = p.theta1 if which == 1 else p.theta2
    return make_family(p.family, td * p.theta3, p.zeta)


def marginal_cdf(p: BivMaxParams, which: int, x):
    return marginal_family(p, which).cdf(x)


def marginal_pmf(p: BivMaxParams, which: int, x):
    return marginal_family(p, which).pmf(x)


def joint_pmf(p: BivMaxParams, x1, x2):
    """P[X1 = x1, X2 = x2] by second-order differencing of the joint CDF."""
    scalar, a, b = _prep(x1, x2)
    out = joint_cdf(p, a, b) - joint_cdf(p, a - 1, b) - joint_cdf(p, a, b - 1) + joint_cdf(p, a - 1, b - 1)
    out = np.where((a < 0) | (b < 0), 0.0, np.maximum(out, 0.0))
    return _out(scalar, out)


def joint_pmf_latent(p: BivMaxParams, x1, x2, backend=None):
    """Joint PMF from nonnegative latent-event terms (the likelihood path)."""
    scalar, a, b = _prep(x1, x2)
    k = _backend.get_kernels(backend)
    lt1, lt2, lt3 = p.log_thetas
    flat = np.asarray(
        k.pair_prob_array(
            np.ascontiguousarray(a.ravel(), dtype=np.int64),
            np.ascontiguousarray(b.ravel(), dtype=np.int64),
            lt1, lt2, lt3, p.zeta, p.kernel_model,
        ),
        dtype=float,
    )
    return _out(scalar, flat.reshape(a.shape))


def _require_dsiw(p: BivMaxParams, what: str):
    if p.family != "dsiw":
        raise TypeError(f"{what} is defined for the BDsIW (max, DsIW) model only")


def _G(x, theta, zeta):
    return DsIW(theta, zeta).cdf(x)


def _g(x, theta, zeta):
    return DsIW(theta, zeta).pmf(x)


def joint_pmf_closed_form(p: BivMaxParams, x1, x2):
    """Region-wise closed-form PMF for BDsIW (cross-check of :func:`joint_pmf`)."""
    _require_dsiw(p, "the closed-form PMF")
    scalar, a, b = _prep(x1, x2)
    t1, t2, t3 = p.thetas
    z = p.zeta
    f1 = _g(a, t1 * t3, z) * _g(b, t2, z)
    f2 = _g(a, t1, z) * _g(b, t2 * t3, z)
    f3 = _G(a, t2, z) * _g(a, t1 * t3, z) - _G(a - 1, t2 * t3, z) * _g(a, t1, z)
    out = np.where(a < b, f1, np.where(b < a, f2, f3))
    out = np.where((a < 0) | (b < 0), 0.0, out)
    return _out(scalar, out)


# ---------------------------------------------------------------------------
# hazards


def bhrf(p: BivMaxParams, x1, x2):
    """Bivariate hazard rate: joint PMF over joint reliability."""
    scalar, a, b = _prep(x1, x2)
    r = joint_reliability(p, a, b)
    if np.any(r <= 0.0):
        raise UndefinedHazardError("joint reliability is zero; hazard undefined")
    # the latent-event PMF keeps relative accuracy where r is small
    return _out(scalar, joint_pmf_latent(p, a, b) / r)


def _hazard_lead(x, zeta):
    return zeta * (x + 1.0) ** (-zeta - 1.0)


def cond_hazard(p: BivMaxParams, variant: str, x1: int, x2: int) -> float:
    """Conditional hazards of one component given the other survives.

    ``variant`` is one of ``"r*1|2"``, ``"r*2|1"`` (region ``x1 < x2``) or
    ``"r**1|2"``, ``"r**2|1"`` (region ``x2 < x1``). The expressions carry
    continuous-derivative factors ``zeta (x+1)^(-zeta-1) ln(theta)``, so they
    are pseudo-hazards; :func:`bhrf` is the exact discrete quantity.
    """
    _require_dsiw(p, "cond_hazard")
    if variant not in COND_HAZARD_VARIANTS:
        raise ValueError(f"variant must be one of {COND_HAZARD_VARIANTS}")
    if variant.startswith("r**"):
        if not x2 < x1:
            raise ValueError(f"{variant} requires x2 < x1")
    elif not x1 < x2:
        raise ValueError(f"{variant} requires x1 < x2")
    t1, t2, t3 = p.thetas
    z = p.zeta
    R = joint_reliability(p, x1, x2)
    if R <= 0.0:
        raise UndefinedHazardError("joint reliability is zero; hazard undefined")
    if variant == "r*1|2":
        num = _hazard_lead(x1, z) * (_G(x2, t2, z) - 1.0) * _G(x1, t1 * t3, z) * math.log(t1 * t3)
    elif variant == "r*2|1":
        num = (
            _hazard_lead(x2, z)
            * _G(x2, t2, z)
            * (_G(x1, t1 * t3, z) * math.log(t2) - _G(x2, t3, z) * math.log(t2 * t3))
        )
    elif variant == "r**1|2":
        num = (
            _hazard_lead(x1, z)
            * _G(x1, t1, z)
            * (_G(x2, t2 * t3, z) * math.log(t1) - _G(x1, t3, z) * math.log(t1 * t3))
        )
    else:
        num = _hazard_lead(x2, z) * (_G(x1, t1, z) - 1.0) * _G(x2, t2 * t3, z) * math.log(t2 * t3)
    return num / R


def vector_hazard(p: BivMaxParams, x) -> tuple[float, float, float]:
    """Hazard vector ``(r(x), r12(x1), r21(x2))`` of a two-component parallel system.

    ``x`` is an integer age (all three components at that age) or a pair
    ``(x1, x2)``, in which case the system term uses ``min(x1, x2)``.
    ``r12``/``r21`` are the pseudo-hazard forms
    ``zeta (x+1)^(-zeta-1) ln(theta_d) / (1 - F(x; theta_d))``.
    """
    _require_dsiw(p, "vector_hazard")
    if np.ndim(x) == 0:
        x1 = x2 = int(x)
    else:
        x1, x2 = (int(v) for v in x)
    xs = min(x1, x2)
    t1, t2, t3 = p.thetas
    z = p.zeta
    r3 = joint_reliability(p, xs, xs)
    if r3 <= 0.0:
        raise UndefinedHazardError("joint reliability is zero; hazard undefined")
    prev = _G(xs - 1, t3, z) * (-_G(xs - 1, t1, z) - _G(xs - 1, t2, z) + _G(xs - 1, t1 * t2, z))
    curr = _G(xs, t3, z) * (_G(xs, t1, z) + _G(xs, t2, z) - _G(xs, t1 * t2, z))
    r_sys = (prev + curr) / r3

    def component(xd, td):
        surv = 1.0 - _G(xd, td, z)
        if surv <= 0.0:
            raise UndefinedHazardError("component survival is zero; hazard undefined")
        return _hazard_lead(xd, z) * math.log(td) / surv

    return r_sys, component(x1, t1), component(x2, t2)


# ---------------------------------------------------------------------------
# conditionals and summaries


def conditional_pmf(p: BivMaxParams, x1, given_x2: int):
    """P[X1 = x1 | X2 = given_x2]."""
    denom = marginal_pmf(p, 2, given_x2)
    if not denom > 0.0:
        raise ValueError("conditioning value has zero probability")
    return joint_pmf_latent(p, x1, np.broadcast_to(given_x2, np.shape(x1))) / denom


def conditional_cdf(p: BivMaxParams, x1, given_le_x2: int):
    """P[X1 <= x1 | X2 <= given_le_x2]."""
    denom = marginal_cdf(p, 2, given_le_x2)
    if not denom > 0.0:
        raise ValueError("conditioning event has zero probability")
    return joint_cdf(p, x1, np.broadcast_to(given_le_x2, np.shape(x1))) / denom


def max_marginal(p: BivMaxParams) -> DsIW:
    """Distribution of ``max(X1, X2)``, which is DsIW(theta1 theta2 theta3, zeta)."""
    _require_dsiw(p, "max_marginal")
    return DsIW(p.theta1 * p.theta2 * p.theta3, p.zeta)


_DIRECT_TERMS = 1 << 20
_TAIL_START = 1 << 16


def stress_strength(p: BivMaxParams, tol: float = 1e-9) -> float:
    """P[X1 < X2] for the BDsIW model.

    Sums ``F_DsIW(x - 1; theta1 theta3) f_DsIW(x; theta2)`` over ``x >= 1``.
    The series is truncated where the tail bound ``(N+1)^(-zeta) |ln theta2|``
    drops below ``tol``; when that needs more than about a million terms the
    remainder is taken from an Euler-Maclaurin estimate.
    """
    _require_dsiw(p, "stress_strength")
    if not tol > 0:
        raise ValueError("tol must be positive")
    t1, t2, t3 = p.thetas
    z = p.zeta
    a_fam, b_fam = DsIW(t1 * t3, z), DsIW(t2, z)
    n_needed = math.ceil((abs(math.log(t2)) / tol) ** (1.0 / z))
    if n_needed <= _DIRECT_TERMS:
        x = np.arange(1, n_needed + 1, dtype=float)
        return float(np.sum(a_fam.cdf(x - 1) * b_fam.pmf(x)))

    x = np.arange(1, _TAIL_START, dtype=float)
    head = float(np.sum(a_fam.cdf(x - 1) * b_fam.pmf(x)))
    la, lb = a_fam.log_theta, b_fam.log_theta

    def term(t):
        # continuous extension of the summand for t >= 1
        step = t ** -z * -math.expm1(-z * math.log1p(1.0 / t))
        return math.exp(la * t ** -z) * math.exp(lb * (t + 1.0) ** -z) * -math.expm1(lb * step)

    n0 = float(_TAIL_START)
    # t = n0 e^s turns the algebraic decay into an exponential one; beyond
    # s_max the remaining mass is below tol / 1000
    s_max = min(700.0, math.log(abs(lb) / (tol * 1e-3)) / z - math.log(n0))
    integral, _ = integrate.quad(
        lambda s: term(n0 * math.exp(s)) * n0 * math.exp(s), 0.0, max(s_max, 1.0), epsabs=tol * 1e-2, epsrel=1e-10, limit=400
    )
    h = 0.5
    deriv = (term(n0 + h) - term(n0 - h)) / (2 * h)
    return head + integral + 0.5 * term(n0) - deriv / 12.0


def median_correlation(p: BivMaxParams) -> float:
    """Median correlation ``4 F(M1, M2) - 1`` with ``M_d`` the marginal medians."""
    m1 = marginal_family(p, 1).median()
    m2 = marginal_family(p, 2).median()
    return 4.0 * joint_cdf(p, m1, m2) - 1.0


_PGF_MAX_TERMS = 50_000_000


def pgf(p: BivMaxParams, y1: float, y2: float, tol: float = 1e-9) -> float:
    """Joint probability generating function ``E[y1**X1 * y2**X2]``.

    Evaluated as the sum over the three regions ``x1 < x2``, ``x2 < x1`` and
    the diagonal, where the joint PMF factorises, in O(N) work. Truncation
    at ``N`` with ``max(|y1|, |y2|)**(N+1) < tol`` bounds the neglected mass.
    """
    if not (abs(y1) < 1 and abs(y2) < 1):
        raise ValueError("pgf requires |y1| < 1 and |y2| < 1")
    if not tol > 0:
        raise ValueError("tol must be positive")
    r = max(abs(y1), abs(y2))
    n = 0 if r == 0 else max(1, math.ceil(math.log(tol) / math.log(r)))
    if n > _PGF_MAX_TERMS:
        raise ValueError("arguments too close to the unit circle for the requested tol")
    x = np.arange(n + 1, dtype=float)
    w1, w2, _ = p.latents
    m1, m2 = marginal_family(p, 1), marginal_family(p, 2)
    if p.construction == "max":
        # x1 < x2: P[max(W1,W3) = x1] P[W2 = x2]; x2 < x1 mirrored
        below_a, above_b = m1.pmf(x), w2.pmf(x)
        above_c, below_d = w1.pmf(x), m2.pmf(x)
    else:
        # min model: x1 < x2 is P[W1 = x1] P[min(W2,W3) = x2]
        below_a, above_b = w1.pmf(x), m2.pmf(x)
        above_c, below_d = m1.pmf(x), w2.pmf(x)
    p1 = np.power(y1, x)
    p2 = np.power(y2, x)

    def strictly_below(v):
        c = np.cumsum(v)
        return np.concatenate(([0.0], c[:-1]))

    upper = np.sum(above_b * p2 * strictly_below(below_a * p1))
    lower = np.sum(above_c * p1 * strictly_below(below_d * p2))
    diag = np.sum(joint_pmf_latent(p, x, x) * p1 * p2)
    return float(upper + lower + diag)


# ---------------------------------------------------------------------------
# dependence diagnostics


def pqd_check(p: BivMaxParams, grid_max: int) -> GridCheck:
    """Positive quadrant dependence ``F(x1, x2) >= F1(x1) F2(x2)`` on a grid.

    ``worst`` is the minimum slack ``F - F1 F2`` over ``[0, grid_max]^2``.
    """
    if grid_max < 0:
        raise ValueError("grid_max must be >= 0")
    g = np.arange(grid_max + 1)
    X1, X2 = np.meshgrid(g, g, indexing="ij")
    slack = joint_cdf(p, X1, X2) - np.outer(marginal_cdf(p, 1, g), marginal_cdf(p, 2, g))
    i, j = np.unravel_index(np.argmin(slack), slack.shape)
    worst = float(slack[i, j])
    return GridCheck(worst >= 0.0, worst, (int(i), int(j)))


def tp2_check(p: BivMaxParams, grid_max: int, rtol: float = 1e-12) -> GridCheck:
    """Total positivity of order two of the joint reliability on a grid.

    Checks ``R(a, c) R(b, d) >= R(b, c) R(a, d)`` for all ``a <= b`` and
    ``c <= d`` in ``[0, grid_max]``; ``worst`` is the smallest ratio of the
    two sides and the check passes when it is at least ``1 - rtol``.
    """
    if grid_max < 1:
        raise ValueError("grid_max must be >= 1")
    g = np.arange(grid_max + 1)
    X1, X2 = np.meshgrid(g, g, indexing="ij")
    R = joint_reliability(p, X1, X2)
    upper = np.triu(np.ones((g.size, g.size), dtype=bool))
    worst, where = math.inf, ()
    with np.errstate(divide="ignore", invalid="ignore"):
        for a in range(g.size):
            for b in range(a, g.size):
                ratio = np.outer(R[a], R[b]) / np.outer(R[b], R[a])
                ratio = np.where(upper, ratio, np.inf)
                c, d = np.unravel_index(np.argmin(ratio), ratio.shape)
                if ratio[c, d] < worst:
                    worst, where = float(ratio[c, d]), (a, b, int(c), int(d))
    return GridCheck(worst >= 1.0 - rtol, worst, where)


# ---------------------------------------------------------------------------
# sampling


def _combine(p: BivMaxParams, w1, w2, w3):
    if p.construction == "max":
        return np.maximum(w1, w3), np.maximum(w2, w3)
    return np.minimum(w1, w3), np.minimum(w2, w3)


def sample_pair(p: BivMaxParams, rng: np.random.Generator) -> PairObs:
    """Draw one pair through the latent construction."""
    w1, w2, w3 = (lat.sample(rng) for lat in p.latents)
    a, b = _combine(p, w1, w2, w3)
    return PairObs(int(a), int(b))


def sample_pairs(p: BivMaxParams, n: int, rng: np.random.Generator):
    """Draw ``n`` pairs; returns two int64 arrays ``(x1, x2)``."""
    w1, w2, w3 = (lat.sample(rng, n) for lat in p.latents)
    return _combine(p, w1, w2, w3)
