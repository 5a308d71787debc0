"""The critical circle-map family F_t(x) = F_0(x) + t and its calculus.

F_0' is sin^{l-1}(pi x) normalised to unit mean, stored as a cosine
polynomial in 2 pi x so that F_0 has a closed-form antiderivative. For
l = 3 this is the classical map x - sin(2 pi x) / (2 pi).
"""
from __future__ import annotations

import math
from fractions import Fraction
from dataclasses import dataclass, field
from math import comb

import numpy as np

from . import _kernels as K
from .errors import DegenerateDerivativeError

DERIVATIVE_FLOOR = 1e-14


@dataclass(frozen=True, order=True)
class LiftPoint:
    """A point of the real line split as integer winding + fraction in [0, 1)."""

    integer_part: int
    frac: float

    def __post_init__(self):
        if not 0.0 <= self.frac < 1.0:
            raise ValueError(f"frac {self.frac} outside [0, 1)")
        object.__setattr__(self, "integer_part", int(self.integer_part))

    @classmethod
    def from_real(cls, x: float) -> "LiftPoint":
        k, y = K.split(float(x))
        return cls(int(k), float(y))

    @property
    def value(self) -> float:
        return self.integer_part + self.frac

    def __float__(self):
        return self.value

    def shift(self, n: int) -> "LiftPoint":
        return LiftPoint(self.integer_part + int(n), self.frac)


def _as_lift(x) -> LiftPoint:
    return x if isinstance(x, LiftPoint) else LiftPoint.from_real(x)


def _cosine_coefficients(l: int) -> np.ndarray:
    m = (l - 1) // 2
    central = comb(2 * m, m)
    a = np.empty(m + 1)
    a[0] = 1.0
    for k in range(1, m + 1):
        a[k] = 2.0 * (-1) ** k * comb(2 * m, m - k) / central
    return a


def _taylor_coefficients(l: int, radius: float, terms: int = 40) -> np.ndarray:
    """Coefficients c_j of y^(2j+1) in F_0(y), truncated for |y| < radius.

    The power sums of the cosine coefficients are formed in rational
    arithmetic, so the vanishing low-order terms come out exactly zero.
    """
    m = (l - 1) // 2
    central = comb(2 * m, m)
    a = [Fraction(2 * (-1) ** k * comb(2 * m, m - k), central) for k in range(m + 1)]
    a[0] = Fraction(1)
    out = np.zeros(m + terms)
    for j in range(m + terms):
        s = sum(a[k] * k ** (2 * j) for k in range(1, m + 1)) + (a[0] if j == 0 else 0)
        out[j] = (-1) ** j * float(s) * (2.0 * math.pi) ** (2 * j) / math.factorial(2 * j + 1)
    size = np.abs(out) * radius ** (2 * np.arange(out.size) + 1)
    keep = np.nonzero(size > 1e-18 * size.max())[0][-1] + 1
    return out[:keep]


def _series_radius(l: int) -> float:
    """Where y / F_0(y) drops to 100, i.e. the closed form loses < ~100 ulp."""
    m = (l - 1) // 2
    # leading term: F_0(y) ~ inv_norm * pi^(l-1) y^l / l
    lead = 4.0**m / comb(2 * m, m) * math.pi ** (l - 1) / l
    return min(0.25, (0.01 / lead) ** (1.0 / (l - 1)))


@dataclass(frozen=True)
class CriticalFamily:
    """Sine-power critical family with odd critical exponent ``l``.

    Examples
    --------
    >>> fam = CriticalFamily(3)
    >>> round(fam.lift_real(0.0, 0.25), 8)
    0.09084506
    """

    critical_exponent: int = 3
    cosine_coeffs: np.ndarray = field(init=False, repr=False, compare=False)
    _params: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        l = self.critical_exponent
        if not isinstance(l, (int, np.integer)) or l < 3 or l % 2 == 0:
            raise ValueError(f"critical exponent must be an odd integer >= 3, got {l!r}")
        l = int(l)
        object.__setattr__(self, "critical_exponent", l)
        coeffs = _cosine_coefficients(l)
        coeffs.setflags(write=False)
        m = (l - 1) // 2
        inv_norm = 4.0**m / comb(2 * m, m)
        radius = _series_radius(l)
        taylor = _taylor_coefficients(l, radius)
        taylor.setflags(write=False)
        object.__setattr__(self, "cosine_coeffs", coeffs)
        object.__setattr__(self, "_params", (l, coeffs, taylor, radius, inv_norm))

    @classmethod
    def from_spec(cls, name: str = "sine-l", l: int = 3) -> "CriticalFamily":
        if name != "sine-l":
            raise ValueError(f"unknown family {name!r}; only 'sine-l' is available")
        return cls(l)

    @property
    def name(self) -> str:
        return "sine-l"

    @property
    def spec(self) -> dict:
        return {"family": self.name, "l": self.critical_exponent}

    @property
    def params(self) -> tuple:
        return self._params

    # -- evaluation -------------------------------------------------------
    def f0(self, x: float) -> float:
        """F_0 on the real line (uses equivariance)."""
        n = math.floor(x + 0.5)
        return n + K.f0_centered(*self._params, x - n)

    def lift_real(self, t: float, x: float) -> float:
        return K.iterate_real(*self._params, float(t), float(x), 1)

    def iterate_real(self, t: float, x: float, n: int) -> float:
        return K.iterate_real(*self._params, float(t), float(x), int(n))

    def derivatives(self, t: float, x: float) -> tuple[float, float, float]:
        """F_t', F_t'', F_t''' at x (independent of t)."""
        y = x - math.floor(x)
        return K.derivs(self.critical_exponent, self._params[4], y)

    def derivative_cosine(self, x: float) -> tuple[float, float, float]:
        """The same three derivatives evaluated from the cosine polynomial."""
        k = np.arange(len(self.cosine_coeffs))
        w = 2.0 * math.pi * k
        a = self.cosine_coeffs
        th = w * x
        return (
            float(np.sum(a * np.cos(th))),
            float(-np.sum(a * w * np.sin(th))),
            float(-np.sum(a * w * w * np.cos(th))),
        )


@dataclass(frozen=True)
class AffineFamily:
    """Test seam: f_t(x) = slope * x + t. With slope 1 this is the rigid rotation."""

    slope: float = 1.0

    def lift_real(self, t: float, x: float) -> float:
        return self.slope * x + t

    def iterate_real(self, t: float, x: float, n: int) -> float:
        for _ in range(int(n)):
            x = self.slope * x + t
        return x

    def derivatives(self, t: float, x: float) -> tuple[float, float, float]:
        return self.slope, 0.0, 0.0


def lift_eval(fam, t: float, x) -> LiftPoint:
    """One application of the lift, keeping the winding count exact."""
    x = _as_lift(x)
    if isinstance(fam, CriticalFamily):
        k, y = K.step(*fam.params, float(t), np.int64(x.integer_part), float(x.frac))
        return LiftPoint(int(k), float(y))
    # equivariance: only the fraction goes through the map
    return LiftPoint.from_real(fam.lift_real(t, x.frac)).shift(x.integer_part)


def iterate(fam, t: float, x, n: int) -> LiftPoint:
    """n-fold composition of the lift (n = 0 is the identity)."""
    if n < 0:
        raise ValueError("n must be >= 0")
    x = _as_lift(x)
    if isinstance(fam, CriticalFamily):
        k, y = K.iterate(*fam.params, float(t), np.int64(x.integer_part), float(x.frac), int(n))
        return LiftPoint(int(k), float(y))
    for _ in range(n):
        x = lift_eval(fam, t, x)
    return x


def _chain_generic(fam, t, x, n):
    dprod, schw, nonlin, dmin = 1.0, 0.0, 0.0, math.inf
    for _ in range(n):
        d1, d2, d3 = fam.derivatives(t, x)
        dmin = min(dmin, abs(d1))
        if d1 == 0.0:
            return 0.0, math.nan, math.nan, 0.0
        nf = d2 / d1
        schw += (d3 / d1 - 1.5 * nf * nf) * dprod * dprod
        nonlin += nf * dprod
        dprod *= d1
        x = fam.lift_real(t, x)
    return dprod, schw, nonlin, dmin


def _chain(fam, t, x, n):
    if n < 1:
        raise ValueError("n must be >= 1")
    x = float(_as_lift(x).value) if isinstance(x, LiftPoint) else float(x)
    if isinstance(fam, CriticalFamily):
        return K.chain(*fam.params, float(t), x, int(n))
    return _chain_generic(fam, t, x, n)


def derivative_of_iterate(fam, t: float, x, n: int) -> float:
    """(f_t^n)'(x) as the product of f_t' along the orbit."""
    return float(_chain(fam, t, x, n)[0])


def schwarzian_of_iterate(fam, t: float, x, n: int) -> float:
    """S(f_t^n)(x) = sum_i Sf(f^i x) * ((f^i)'(x))^2.

    Raises
    ------
    DegenerateDerivativeError
        If some |f'(f^i x)|, i < n, falls below 1e-14.
    """
    _, schw, _, dmin = _chain(fam, t, x, n)
    if dmin < DERIVATIVE_FLOOR:
        raise DegenerateDerivativeError(f"derivative {dmin:.3g} along the orbit of {x}")
    return float(schw)


def nonlinearity(fam, t: float, x, n: int) -> float:
    """h''/h' for h = f_t^n, via n(f o g) = (nf o g) g' + ng."""
    _, _, nonlin, dmin = _chain(fam, t, x, n)
    if dmin < DERIVATIVE_FLOOR:
        raise DegenerateDerivativeError(f"derivative {dmin:.3g} along the orbit of {x}")
    return float(nonlin)


def cross_ratio(a: float, b: float, c: float, d: float) -> float:
    """Cr(a, b, c, d) = |b-a||d-c| / (|c-a||d-b|) for a < b < c < d."""
    if not a < b < c < d:
        raise ValueError("cross-ratio needs strictly increasing points a < b < c < d")
    return (b - a) * (d - c) / ((c - a) * (d - b))
