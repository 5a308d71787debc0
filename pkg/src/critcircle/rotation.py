"""Rotation numbers, frequency locking, tongue centers and harmonic codes.

The comparator decides whether the rotation number of f_t is below, equal
to or above a rational p/q by locating the extrema of g(x) = f_t^q(x) - x - p.
By default the search covers only the arc from 0 to its nearest neighbour
among f(0), ..., f^{q-1}(0): a periodic orbit of rotation number p/q
interleaves those q points, so it meets that arc, and the sign test stays
exact while costing O(q) instead of O(q^2) map evaluations.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from . import _kernels as K
from .errors import DegenerateDerivativeError, ResolutionError
from .family import AffineFamily, CriticalFamily, LiftPoint, iterate
from .farey import (
    ONE,
    ZERO,
    FareyDomain,
    HarmonicCode,
    UNIT,
    as_rational,
    farey_parents,
    harmonic_endpoint,
)

SIGN_TOL = 1e-13
CENTER_TOL = 1e-13
CENTER_MAX_ITER = 200
ARC_POINTS = 64
# golden-section tolerance in x for boundary solves: the extremum value is
# quadratic in the location error, so this is far below the sign tolerance
BOUNDARY_XTOL = 1e-9
Q_MAX = 10**5


class Comparison(enum.IntEnum):
    BELOW = -1
    LOCKED = 0
    ABOVE = 1


@dataclass(frozen=True)
class Tongue:
    """Frequency-locking interval of ``rho`` with its center."""

    rho: Fraction
    t_lo: float
    t_hi: float
    center: float
    tol: float

    def __post_init__(self):
        if not self.t_lo <= self.center <= self.t_hi:
            raise ValueError(f"tongue {self.rho}: center outside [t_lo, t_hi]")

    @property
    def width(self) -> float:
        return self.t_hi - self.t_lo


def _rational(pq) -> Fraction:
    return as_rational(pq)


def birkhoff_rotation_number(fam, t: float, n_iter: int) -> tuple[float, float]:
    """f_t^n(0)/n together with the a-priori error bound 1/n."""
    if n_iter < 1:
        raise ValueError("n_iter must be >= 1")
    x = iterate(fam, t, LiftPoint(0, 0.0), n_iter)
    return (x.integer_part + x.frac) / n_iter, 1.0 / n_iter


def extrema(fam: CriticalFamily, t: float, pq, region: str = "arc",
            xtol: float = 1e-13) -> tuple[float, float]:
    """Min and max of f_t^q(x) - x - p over the search region.

    ``region="arc"`` searches the critical arc (see module docstring);
    ``region="circle"`` uses a uniform grid of max(64, 8q) points on [0, 1].
    """
    r = _rational(pq)
    p, q = r.numerator, r.denominator
    if region == "arc":
        b = K.critical_arc(*fam.params, float(t), q)
        return K.extrema_on(*fam.params, float(t), p, q, 0.0, b, ARC_POINTS, xtol)
    if region == "circle":
        return K.extrema_on(*fam.params, float(t), p, q, 0.0, 1.0, max(64, 8 * q), xtol)
    raise ValueError(f"unknown region {region!r}")


def compare_to_rational(fam: CriticalFamily, t: float, pq, q_max: int = Q_MAX,
                        eps: float = SIGN_TOL, region: str = "arc") -> Comparison:
    """Position of rho(t) relative to ``pq``.

    Raises
    ------
    ResolutionError
        If the extrema are within ``eps`` of zero so that the sign cannot be
        certified.
    """
    r = _rational(pq)
    if r.denominator > q_max:
        raise ValueError(f"denominator {r.denominator} exceeds q_max={q_max}")
    gmin, gmax = extrema(fam, t, r, region)
    if gmax < -eps:
        return Comparison.BELOW
    if gmin > eps:
        return Comparison.ABOVE
    if gmin < -eps and gmax > eps:
        return Comparison.LOCKED
    raise ResolutionError(
        f"cannot certify rho({t!r}) against {r}: extrema ({gmin:.3g}, {gmax:.3g})"
    )


def compare_grid(fam: CriticalFamily, ts, pq, eps: float = SIGN_TOL) -> np.ndarray:
    """Comparison codes (-1, 0, 1; 2 for unresolved) over an array of parameters."""
    r = _rational(pq)
    ts = np.ascontiguousarray(ts, dtype=float)
    return K.compare_grid(*fam.params, ts, r.numerator, r.denominator, ARC_POINTS, 1e-13, eps)


def center(fam: CriticalFamily, pq, tol: float = CENTER_TOL) -> float:
    """Parameter at which the critical point is periodic with rotation ``pq``.

    f_t^q(0) increases strictly with t, so plain bisection on [0, 1] is used.
    """
    r = _rational(pq)
    if r == ZERO:
        return 0.0
    if r == ONE:
        return 1.0
    t, it = K.center_bisect(*fam.params, r.numerator, r.denominator, 0.0, 1.0, tol,
                            CENTER_MAX_ITER)
    if it >= CENTER_MAX_ITER:
        raise ResolutionError(f"center of {r} did not converge in {CENTER_MAX_ITER} steps")
    return float(t)


def _boundary(fam, r, inside, outside, which, tol):
    """Locking boundary of ``r`` between a locked ``inside`` and an unlocked ``outside``.

    The relevant extremum of f^q - x - p moves almost linearly with t, so a
    secant step from ``inside`` predicts the crossing; a bracket grown around
    the prediction then goes to Brent's method.
    """
    p, q = r.numerator, r.denominator
    params = fam.params
    side = -1 if which == "hi" else 1
    seen: dict[float, float] = {}

    def fn(t):
        if t not in seen:
            bb = K.critical_arc(*params, t, q)
            ext = K.extrema_on(*params, t, p, q, 0.0, bb, ARC_POINTS, BOUNDARY_XTOL, side)
            seen[t] = ext[0] if side < 0 else ext[1]
        return seen[t]

    f_in = fn(inside)
    if f_in == 0.0:
        return inside
    span = outside - inside
    # bracket [a, b]: a has the inside sign, b the outside sign
    a, fa = inside, f_in
    b, fb = outside, None
    x0, f0 = inside, f_in
    x1 = inside + 1e-3 * span
    f1 = fn(x1)
    for _ in range(8):
        if f1 * f_in <= 0:
            b, fb = x1, f1
            break
        a, fa = x1, f1
        if f1 == f0:
            break
        guess = x1 - f1 * (x1 - x0) / (f1 - f0)
        # nudge past the prediction so an accurate guess brackets at once
        guess += 1e-4 * (guess - inside)
        if not 0 < (guess - inside) / span < 1:
            break
        x0, f0 = x1, f1
        x1, f1 = guess, fn(guess)
    if fb is None:
        fb = fn(outside)
    if fb == 0.0:
        return b
    if fa * fb > 0:
        raise ResolutionError(f"boundary of {r} not bracketed between {inside} and {outside}")
    return brentq(fn, min(a, b), max(a, b), xtol=tol, rtol=4 * np.finfo(float).eps, maxiter=400)


def locking_interval(fam: CriticalFamily, pq, tol: float = CENTER_TOL,
                     centers: Optional[dict] = None) -> tuple[float, float]:
    """Endpoints of the frequency-locking interval of ``pq`` within [0, 1].

    Lockings of 0/1 and 1/1 are half-tongues cut at the ends of the
    parameter range. ``centers`` may carry already known centers (of ``pq``
    and its Farey parents) to skip recomputation.
    """
    r = _rational(pq)
    centers = {} if centers is None else centers

    def c(u):
        if u not in centers:
            centers[u] = center(fam, u, tol)
        return centers[u]

    cr = c(r)
    if r == ZERO:
        return 0.0, _boundary(fam, r, 0.0, 1.0, "hi", tol)
    if r == ONE:
        return _boundary(fam, r, 1.0, 0.0, "lo", tol), 1.0
    left, right = farey_parents(r)
    t_lo = _boundary(fam, r, cr, c(left), "lo", tol)
    t_hi = _boundary(fam, r, cr, c(right), "hi", tol)
    return min(t_lo, cr), max(t_hi, cr)


def tongue(fam: CriticalFamily, pq, tol: float = CENTER_TOL,
           centers: Optional[dict] = None) -> Tongue:
    r = _rational(pq)
    centers = {} if centers is None else centers
    t_lo, t_hi = locking_interval(fam, r, tol, centers)
    return Tongue(r, float(t_lo), float(t_hi), float(centers[r]), tol)


def _locate(cmp, max_pick):
    """Find the cell index of rho among endpoints u_n using comparisons only.

    ``cmp(n)`` compares rho with u_n. Returns ("E", n) or ("S", n).
    """
    c0 = cmp(0)
    if c0 is Comparison.LOCKED:
        return "E", 0
    if c0 is Comparison.BELOW:
        # rho in (lo, u_0): u_n decreases with n; find first n with rho >= u_n
        known_below, probe = 0, 1
        while True:
            if probe > max_pick:
                raise ResolutionError("harmonic pick exceeds limit")
            c = cmp(probe)
            if c is Comparison.LOCKED:
                return "E", probe
            if c is Comparison.ABOVE:
                break
            known_below, probe = probe, 2 * probe
        lo_n, hi_n = known_below, probe
        while hi_n - lo_n > 1:
            mid = (lo_n + hi_n) // 2
            c = cmp(mid)
            if c is Comparison.LOCKED:
                return "E", mid
            if c is Comparison.BELOW:
                lo_n = mid
            else:
                hi_n = mid
        return "S", lo_n
    # rho in (u_0, hi): go to negative indices, u_n increases as n decreases
    known_above, probe = 0, -1
    while True:
        if -probe > max_pick:
            raise ResolutionError("harmonic pick exceeds limit")
        c = cmp(probe)
        if c is Comparison.LOCKED:
            return "E", probe
        if c is Comparison.BELOW:
            break
        known_above, probe = probe, 2 * probe
    hi_n, lo_n = known_above, probe
    while hi_n - lo_n > 1:
        mid = (lo_n + hi_n) // 2
        c = cmp(mid)
        if c is Comparison.LOCKED:
            return "E", mid
        if c is Comparison.ABOVE:
            hi_n = mid
        else:
            lo_n = mid
    # rho between u_{hi_n} (below rho) and u_{lo_n} (above rho): cell J_{lo_n}
    return "S", lo_n


def param_harmonic_code(fam: CriticalFamily, t: float, depth: int,
                        base: FareyDomain = UNIT, max_pick: int = 10**6) -> HarmonicCode:
    """Harmonic code of rho(t) to the given depth, by rational comparisons only.

    The code stops early with a terminal E(n) symbol when t is locked at a
    subdivision endpoint.

    Raises
    ------
    ValueError
        If t is locked at an endpoint of ``base``, whose code is infinite.
    """
    for r in (base.lo, base.hi):
        if compare_to_rational(fam, t, r) is Comparison.LOCKED:
            raise ValueError(f"t={t} is locked at the domain endpoint {r}")
    d = base
    symbols: list[int] = []
    for _ in range(depth):
        kind, n = _locate(lambda n: compare_to_rational(fam, t, harmonic_endpoint(d, n)),
                          max_pick)
        if kind == "E":
            return HarmonicCode(tuple(symbols), n)
        symbols.append(n)
        d = HarmonicCode((n,)).domain(d)
    return HarmonicCode(tuple(symbols))


def _orbit_fracs(fam, t, n):
    if isinstance(fam, CriticalFamily):
        _, ys = K.orbit(*fam.params, float(t), np.int64(0), 0.0, int(n))
        return ys[1:]
    if isinstance(fam, AffineFamily) and fam.slope == 1.0:
        i = np.arange(1, n + 1, dtype=float)
        return np.mod(i * t, 1.0)
    out = np.empty(n)
    x = 0.0
    for i in range(n):
        x = fam.lift_real(t, x)
        out[i] = x - math.floor(x)
    return out


def closest_returns_dynamical(fam, t: float, count: int, max_iter: int = 10**7) -> list[int]:
    """First ``count`` times at which the orbit of 0 comes closer to 0 than ever before."""
    n = max(64, 4 * count)
    while True:
        ys = _orbit_fracs(fam, t, n)
        dist = np.minimum(ys, 1.0 - ys)
        out, best = [], math.inf
        for i, d in enumerate(dist, start=1):
            if d < best:
                out.append(i)
                best = d
                if len(out) == count:
                    return out
            if d == 0.0:
                raise ResolutionError(f"orbit of 0 is periodic with period {i}")
        if n >= max_iter:
            raise ResolutionError(f"only {len(out)} closest returns within {max_iter} iterates")
        n = min(4 * n, max_iter)


def nearest_critical_right(fam: CriticalFamily, t: float, Q: int, tol: float = 1e-13) -> float:
    """Nearest critical point of f_t^Q to the right of 0 (on the lift).

    Critical points of f^Q are the preimages f^{-i}(0), 0 <= i < Q; for i = 0
    the next one on the right is 1.
    """
    best = 1.0
    for i in range(1, Q):
        v = K.iterate_real(*fam.params, float(t), 0.0, i)
        target = math.floor(v) + 1.0
        y = K.preimage_bisect(*fam.params, float(t), target, i, 0.0, 1.0, tol)
        best = min(best, y)
    return best


@dataclass
class ParamDerivativeReport:
    Q: int
    q: int
    samples: np.ndarray  # (t, x) pairs
    chain: np.ndarray
    finite_difference: np.ndarray
    proxy: np.ndarray
    fd_max_rel_err: float
    chain_spread: float
    proxy_spread: float
    spread: float


def _circle_dist(a, b):
    d = abs(a - b) % 1.0
    return min(d, 1.0 - d)


def param_derivative_report(fam: CriticalFamily, domain: FareyDomain, samples: int = 100,
                            seed: int = 0, tol: float = CENTER_TOL,
                            fd_step: float = 1e-7) -> ParamDerivativeReport:
    """Compare three routes to d f^Q/dt over the parameter/phase region of a domain.

    Q is the denominator of the lower endpoint and q = |Q' - Q|. Parameters
    are drawn between the lockings of the two endpoints, phases from
    (0, x*) where x* is the nearest critical point of f^Q right of 0.
    The routes are the chain sum, a central difference in t, and the
    interval-ratio proxy sum_i |f^{Q+q}(x)-f^Q(x)| / |f^{i+q}(x)-f^i(x)|.
    """
    Q = domain.lo.denominator
    q = abs(domain.hi.denominator - Q)
    _, t_a = locking_interval(fam, domain.lo, tol)
    t_b, _ = locking_interval(fam, domain.hi, tol)
    rng = np.random.default_rng(seed)
    params = fam.params
    pts, chain, fd, proxy = [], [], [], []
    while len(pts) < samples:
        t = float(rng.uniform(t_a, t_b))
        xr = nearest_critical_right(fam, t, Q)
        x = float(rng.uniform(0.0, xr))
        c = K.param_chain(*params, t, x, Q)
        hp = K.iterate_real(*params, t + fd_step, x, Q)
        hm = K.iterate_real(*params, t - fd_step, x, Q)
        if q == 0:
            pr = float(Q)
        else:
            ks, ys = K.orbit(*params, t, *K.split(x), Q + q)
            orb = ks + ys
            num = _circle_dist(orb[Q + q], orb[Q])
            pr = 0.0
            for i in range(1, Q + 1):
                den = _circle_dist(orb[i + q], orb[i])
                if den < 1e-14:
                    raise DegenerateDerivativeError(f"orbit gap vanished at (t={t}, x={x})")
                pr += num / den
        pts.append((t, x))
        chain.append(c)
        fd.append((hp - hm) / (2 * fd_step))
        proxy.append(pr)
    chain, fd, proxy = map(np.asarray, (chain, fd, proxy))
    ratio = chain / proxy
    allv = np.concatenate([chain, fd])
    return ParamDerivativeReport(
        Q=Q,
        q=q,
        samples=np.asarray(pts),
        chain=chain,
        finite_difference=fd,
        proxy=proxy,
        fd_max_rel_err=float(np.max(np.abs(fd - chain) / chain)),
        chain_spread=float(chain.max() / chain.min()),
        proxy_spread=float(ratio.max() / ratio.min()),
        spread=float(max(allv.max() / allv.min(), ratio.max() / ratio.min())),
    )
