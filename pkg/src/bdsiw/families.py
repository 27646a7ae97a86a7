"""Univariate discrete lifetime families on the nonnegative integers.

Two base families are provided:

* :class:`DsIW` -- discrete inverse Weibull, ``F(x) = theta ** ((x + 1) ** -zeta)``.
* :class:`DsW` -- discrete Weibull, ``F(x) = 1 - theta ** ((x + 1) ** zeta)``,
  with the fixed-shape special cases :class:`DsE` (``zeta = 1``) and
  :class:`DsR` (``zeta = 2``).

All functions accept Python/numpy integers or integer arrays and return a
float (scalar input) or an ``ndarray`` (array input).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import ClassVar

import numpy as np

__all__ = [
    "DsIW",
    "DsW",
    "DsE",
    "DsR",
    "Family",
    "FAMILY_TAGS",
    "make_family",
    "MAX_SUPPORT",
]

# Inverse-transform draws are clipped here so they stay representable as int64.
MAX_SUPPORT = 2**62


def _as_float_array(x):
    scalar = np.ndim(x) == 0
    return scalar, np.asarray(x, dtype=float)


def _out(scalar, arr):
    return float(arr) if scalar else arr


def _neg_power(x, zeta):
    """``(x + 1) ** -zeta`` for ``x >= 0`` evaluated as ``exp(-zeta * log1p(x))``."""
    return np.exp(-zeta * np.log1p(x))


def _neg_power_step(x, zeta):
    """``x ** -zeta - (x + 1) ** -zeta`` for ``x >= 1`` without cancellation."""
    return np.exp(-zeta * np.log(x)) * -np.expm1(-zeta * np.log1p(1.0 / x))


def _pos_power_step(x, zeta):
    """``(x + 1) ** zeta - x ** zeta`` for ``x >= 1`` without cancellation."""
    return np.exp(zeta * np.log(x)) * np.expm1(zeta * np.log1p(1.0 / x))


class Family:
    """Common surface of the univariate families.

    Subclasses implement ``_cdf``, ``_sf`` and ``_pmf`` on float arrays holding
    nonnegative integers, and ``_quantile`` on probabilities in ``[0, 1)``.
    """

    tag: ClassVar[str]
    n_free: ClassVar[int] = 2
    theta: float
    zeta: float

    def _validate(self):
        if not 0.0 < self.theta < 1.0:
            raise ValueError(f"theta must lie in (0, 1), got {self.theta!r}")
        if not (self.zeta > 0.0 and math.isfinite(self.zeta)):
            raise ValueError(f"zeta must be a positive finite number, got {self.zeta!r}")

    @property
    def log_theta(self) -> float:
        return math.log(self.theta)

    def cdf(self, x):
        """P[X <= x]; zero for negative ``x``."""
        scalar, x = _as_float_array(x)
        out = np.zeros_like(x)
        pos = x >= 0
        out[pos] = self._cdf(x[pos])
        return _out(scalar, out)

    def sf(self, x):
        """P[X > x]; one for negative ``x``."""
        scalar, x = _as_float_array(x)
        out = np.ones_like(x)
        pos = x >= 0
        out[pos] = self._sf(x[pos])
        return _out(scalar, out)

    def pmf(self, x):
        """P[X = x], i.e. ``cdf(x) - cdf(x - 1)``; zero off the support."""
        scalar, x = _as_float_array(x)
        out = np.zeros_like(x)
        pos = x >= 0
        out[pos] = self._pmf(x[pos])
        return _out(scalar, out)

    def logpmf(self, x):
        with np.errstate(divide="ignore"):
            return np.log(self.pmf(x))

    def quantile(self, u):
        """Smallest ``x >= 0`` with ``cdf(x) >= u``, for ``u`` in (0, 1).

        Quantiles beyond ``MAX_SUPPORT`` are returned as ``MAX_SUPPORT``.
        Above ``2**53`` the result is exact only to the float64 grid.
        """
        scalar, u = _as_float_array(u)
        if np.any((u <= 0.0) | (u >= 1.0)) or np.any(np.isnan(u)):
            raise ValueError("quantile level must lie in the open interval (0, 1)")
        q = self._quantile_unchecked(u)
        return int(q) if scalar else q

    def _quantile_unchecked(self, u):
        with np.errstate(divide="ignore", over="ignore"):
            x = np.minimum(self._quantile_guess(u), float(MAX_SUPPORT))
        x = np.maximum(np.ceil(x) - 1.0, 0.0)
        # One correction step each way absorbs rounding in the closed form.
        up = self._cdf(x) < u
        x = np.where(up, x + 1.0, x)
        down = (~up) & (x > 0)
        if np.any(down):
            xd = np.where(down, x - 1.0, 0.0)
            moved = down & (self._cdf(xd) >= u)
            x = np.where(moved, xd, x)
            if np.any(moved & (x > 0)):
                x = self._bisect_down(x, u, moved & (x > 0))
        return np.minimum(x, float(MAX_SUPPORT)).astype(np.int64)

    def _bisect_down(self, hi, u, active):
        # Near u = 1 the cdf can be flat in floating point over many integers;
        # find the smallest x with cdf(x) >= u below hi by bisection.
        lo = np.where(active, -1.0, hi - 1.0)
        while True:
            mid = np.floor((lo + hi) / 2.0)
            # Stop where no float lies strictly between the bracket ends.
            busy = (hi - lo > 1.0) & (mid > lo) & (mid < hi)
            if not np.any(busy):
                return hi
            ok = self._cdf(np.maximum(mid, 0.0)) >= u
            hi = np.where(busy & ok, mid, hi)
            lo = np.where(busy & ~ok, mid, lo)

    def median(self) -> int:
        return self.quantile(0.5)

    def sample(self, rng: np.random.Generator, size=None):
        """Inverse-transform draws using ``rng``; an int for ``size=None``."""
        u = rng.random(size)
        x = self._quantile_unchecked(np.atleast_1d(np.asarray(u, dtype=float)))
        return int(x[0]) if size is None else x.reshape(np.shape(u))

    def with_theta(self, theta: float) -> "Family":
        """Same family and shape with a different scale parameter."""
        return make_family(self.tag, theta, self.zeta)


@dataclass(frozen=True)
class DsIW(Family):
    """Discrete inverse Weibull distribution.

    Parameters
    ----------
    theta : float
        Scale in (0, 1); equals ``P[X = 0]``.
    zeta : float
        Positive shape.

    Notes
    -----
    The exponent ``x ** -zeta`` at ``x = 0`` is taken as ``+inf`` so the mass
    at zero is exactly ``theta``.
    """

    theta: float
    zeta: float
    tag: ClassVar[str] = "dsiw"

    def __post_init__(self):
        self._validate()

    def _cdf(self, x):
        return np.exp(self.log_theta * _neg_power(x, self.zeta))

    def _sf(self, x):
        return -np.expm1(self.log_theta * _neg_power(x, self.zeta))

    def _pmf(self, x):
        lt = self.log_theta
        out = np.empty_like(x)
        zero = x == 0
        out[zero] = self.theta
        xs = x[~zero]
        out[~zero] = self._cdf(xs) * -np.expm1(lt * _neg_power_step(xs, self.zeta))
        return out

    def _quantile_guess(self, u):
        return (self.log_theta / np.log(u)) ** (1.0 / self.zeta)


@dataclass(frozen=True)
class DsW(Family):
    """Discrete Weibull distribution with survival ``P[X >= x] = theta ** (x ** zeta)``."""

    theta: float
    zeta: float
    tag: ClassVar[str] = "dsw"

    def __post_init__(self):
        self._validate()

    def _sf(self, x):
        return np.exp(self.log_theta * np.exp(self.zeta * np.log1p(x)))

    def _cdf(self, x):
        return -np.expm1(self.log_theta * np.exp(self.zeta * np.log1p(x)))

    def _pmf(self, x):
        lt = self.log_theta
        out = np.empty_like(x)
        zero = x == 0
        out[zero] = -math.expm1(lt)
        xs = x[~zero]
        # P[X >= x] * (1 - theta ** ((x+1)**zeta - x**zeta))
        out[~zero] = np.exp(lt * np.exp(self.zeta * np.log(xs))) * -np.expm1(
            lt * _pos_power_step(xs, self.zeta)
        )
        return out

    def _quantile_guess(self, u):
        return (np.log1p(-u) / self.log_theta) ** (1.0 / self.zeta)


@dataclass(frozen=True)
class DsE(DsW):
    """Discrete exponential (geometric): :class:`DsW` with ``zeta = 1``."""

    theta: float
    zeta: float = field(default=1.0, init=False)
    tag: ClassVar[str] = "dse"
    n_free: ClassVar[int] = 1


@dataclass(frozen=True)
class DsR(DsW):
    """Discrete Rayleigh: :class:`DsW` with ``zeta = 2``."""

    theta: float
    zeta: float = field(default=2.0, init=False)
    tag: ClassVar[str] = "dsr"
    n_free: ClassVar[int] = 1


FAMILY_TAGS = {"dsiw": DsIW, "dsw": DsW, "dse": DsE, "dsr": DsR}


def make_family(tag: str, theta: float, zeta: float | None = None) -> Family:
    """Build a family from its tag; ``zeta`` is ignored by fixed-shape tags."""
    try:
        cls = FAMILY_TAGS[tag.lower()]
    except KeyError:
        raise ValueError(f"unknown family {tag!r}; expected one of {sorted(FAMILY_TAGS)}") from None
    if cls.n_free == 1:
        return cls(theta)
    if zeta is None:
        raise ValueError(f"family {tag!r} needs a shape parameter")
    return cls(theta, zeta)
