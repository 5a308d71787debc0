"""Harmonic scalings of the parameter space and the saddle-node funnel model.

The harmonic scaling h_n of a Farey domain (P/Q, P'/Q') is the length of the
parameter cell between the centers of u_{n+1} and u_n relative to the
distance between the centers of the two endpoints. Its decay in |n| follows
a cubic law, and it is comparable to the reciprocal of a phase-space sum of
gap ratios along the critical orbit.

The funnel model is the quadratic map y -> y + alpha y^2 + eps, whose
passage time through (-kappa, kappa) grows like (alpha eps)^(-1/2).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from .errors import DegenerateIntervalError, OverflowGuardError, ResolutionError
from .family import CriticalFamily
from .farey import FareyDomain, harmonic_endpoint, mediant, rational_to_code
from .rotation import nearest_critical_right

GAP_FLOOR = 1e-15
PASSAGE_CAP = 10**9


@dataclass
class ScalingReport:
    """Harmonic scalings h_n of one domain for n in ``n_range`` (inclusive)."""

    domain: FareyDomain
    n_range: tuple[int, int]
    h: dict[int, float]
    fit_slope: float
    ratio_spread: float
    depth: int = 0
    fingerprint: str = ""
    centers: dict = field(default_factory=dict, repr=False)

    def cubic_products(self) -> dict[int, float]:
        return {n: v * (abs(n) ** 3 + 1) for n, v in self.h.items()}


def _fit_and_spread(h: dict[int, float]) -> tuple[float, float]:
    tail = {n: v for n, v in h.items() if abs(n) >= 2}
    if len(tail) >= 2:
        ns = np.array(sorted(tail))
        slope = float(np.polyfit(np.log(np.abs(ns)), np.log([tail[n] for n in ns]), 1)[0])
        prod = [tail[n] * (abs(n) ** 3 + 1) for n in ns]
        spread = max(prod) / min(prod)
    else:
        slope, spread = math.nan, math.nan
    return slope, spread


def _domain_depth(domain: FareyDomain) -> int:
    m = mediant(domain.lo, domain.hi)
    return len(rational_to_code(m)) if 0 < m < 1 else 0


def harmonic_scalings(atlas, domain: FareyDomain, n_min: int, n_max: int) -> ScalingReport:
    """h_n = |c(u_{n+1}) - c(u_n)| / |c(P/Q) - c(P'/Q')| for n_min <= n <= n_max.

    Raises
    ------
    MissingCenterError
        If the atlas lacks one of the needed tongues.
    ResolutionError
        If two adjacent centers are closer than ten times the atlas tolerance.
    """
    if n_min > n_max:
        raise ValueError("n_min must not exceed n_max")
    J = abs(atlas.center(domain.hi) - atlas.center(domain.lo))
    centers = {n: atlas.center(harmonic_endpoint(domain, n)) for n in range(n_min, n_max + 2)}
    h = {}
    for n in range(n_min, n_max + 1):
        gap = abs(centers[n + 1] - centers[n])
        if gap < 10 * atlas.tol:
            raise ResolutionError(f"centers of u_{n + 1} and u_{n} differ by {gap:.3g}")
        h[n] = gap / J
    full = [v * (abs(n) ** 3 + 1) for n, v in h.items()]
    slope, _ = _fit_and_spread(h)
    return ScalingReport(
        domain=domain,
        n_range=(n_min, n_max),
        h=h,
        fit_slope=slope,
        ratio_spread=max(full) / min(full),
        depth=_domain_depth(domain),
        fingerprint=getattr(atlas, "fingerprint", ""),
        centers=centers,
    )


def cubic_law_check(report: ScalingReport) -> tuple[float, float]:
    """Log-log slope of h_n against |n| and spread of h_n (|n|^3 + 1), over |n| >= 2.

    Examples
    --------
    >>> from critcircle.farey import UNIT
    >>> h = {n: 1 / (n**3 + 1) for n in range(2, 17)}
    >>> slope, spread = cubic_law_check(ScalingReport(UNIT, (2, 16), h, 0.0, 1.0))
    >>> round(spread, 12)
    1.0
    """
    ns = [n for n in report.h if n >= 2]
    neg = [n for n in report.h if n <= -2]
    if not (set(range(2, 17)) <= set(ns) or set(range(-16, -1)) <= set(neg)):
        raise ValueError("the report must cover n = 2..16 on one side")
    return _fit_and_spread(report.h)


def _oriented(domain: FareyDomain, z: float) -> tuple[FareyDomain, float]:
    """Domain with Q <= Q' and the matching parameter (flip t -> 1 - t)."""
    if domain.lo.denominator <= domain.hi.denominator:
        return domain, z
    return domain.mirror(), 1.0 - z


def phase_sum(fam: CriticalFamily, z: float, domain: FareyDomain, n: int) -> float:
    """Sum_{k<n} |F^{-q}(0) - 0| / |F^{(k+1)Q}(0) - F^{kQ}(0) - P| at parameter z.

    (P/Q, P'/Q') is the domain oriented so that Q <= Q', q = Q' - Q, and
    F^{-q}(0) is the preimage of 0 of order q nearest to 0 on its right;
    among the preimages of order below Q it is the closest one, which is
    how it is computed (order 0 contributes the point 1).

    Raises
    ------
    DegenerateIntervalError
        If some orbit gap is below 1e-15.
    """
    if n < 1:
        raise ValueError("phase_sum needs n >= 1")
    d, z = _oriented(domain, float(z))
    P, Q = d.lo.numerator, d.lo.denominator
    back = nearest_critical_right(fam, z, Q)
    ks, ys = K.orbit(*fam.params, z, np.int64(0), 0.0, n * Q)
    pts = (ks[::Q] - np.arange(n + 1) * P) + ys[::Q]
    gaps = np.abs(np.diff(pts))
    if gaps.min() < GAP_FLOOR:
        raise DegenerateIntervalError(f"orbit gap {gaps.min():.3g} at z={z}")
    return float(np.sum(back / gaps))


def phase_products(atlas, fam: CriticalFamily, domain: FareyDomain, n_max: int,
                   report: ScalingReport | None = None) -> dict[int, tuple[float, float]]:
    """(phase_sum(n), h_n * phase_sum(n)) for n = 1..n_max with z = center(u_n)."""
    if report is None:
        report = harmonic_scalings(atlas, domain, 1, n_max)
    out = {}
    for n in range(1, n_max + 1):
        s = phase_sum(fam, atlas.center(harmonic_endpoint(domain, n)), domain, n)
        out[n] = (s, report.h[n] * s)
    return out


# -- saddle-node funnel ---------------------------------------------------------
@dataclass
class MaximalOrbit:
    """Orbit of y -> y + alpha y^2 + eps across the funnel."""

    alpha: float
    eps: float
    kappa: float
    points: np.ndarray
    passage_length: int

    @property
    def gaps(self) -> np.ndarray:
        return np.diff(self.points)


def passage_estimate(alpha: float, eps: float, kappa: float) -> float:
    """Continuous-time passage (2/sqrt(alpha eps)) arctan(kappa sqrt(alpha/eps))."""
    return 2.0 / math.sqrt(alpha * eps) * math.atan(kappa * math.sqrt(alpha / eps))


def maximal_orbit(alpha: float, eps: float, kappa: float) -> MaximalOrbit:
    """Maximal orbit of the quadratic funnel model on (-kappa, kappa).

    The map is increasing only right of -1/(2 alpha), so the orbit lives in
    (max(-kappa, -1/(2 alpha)), kappa). It starts at the image of the left
    end of that domain, the first point whose preimage under the increasing
    branch lies outside, and stops at the last point inside.

    Raises
    ------
    OverflowGuardError
        If the passage would exceed 10^9 points.

    Examples
    --------
    >>> maximal_orbit(1.0, 1e-2, 1.0).passage_length
    28
    """
    if min(alpha, eps, kappa) <= 0:
        raise ValueError("alpha, eps and kappa must be positive")
    if passage_estimate(alpha, eps, kappa) > PASSAGE_CAP:
        raise OverflowGuardError("passage length would exceed 1e9 points")
    left = max(-kappa, -0.5 / alpha)
    y = left + alpha * left * left + eps
    pts = []
    while y < kappa:
        pts.append(y)
        if len(pts) > PASSAGE_CAP:
            raise OverflowGuardError("passage length exceeded 1e9 points")
        y = y + alpha * y * y + eps
    return MaximalOrbit(alpha, eps, kappa, np.array(pts), len(pts))


def orbit_facts_check(orbit: MaximalOrbit) -> tuple[float, float, float]:
    """(alpha / l^2) / eps, the fraction of gaps below 2 eps, and sum of 1/gap.

    Examples
    --------
    >>> ratio, slow, total = orbit_facts_check(maximal_orbit(1.0, 1e-4, 1.0))
    >>> round(slow, 2)
    0.5
    """
    if orbit.passage_length == 0:
        raise ValueError("empty orbit")
    ratio = (orbit.alpha / orbit.passage_length**2) / orbit.eps
    gaps = orbit.gaps
    if gaps.size == 0:
        return ratio, 0.0, 0.0
    slow = float(np.mean(gaps < 2 * orbit.eps))
    return float(ratio), slow, float(np.sum(1.0 / gaps))


def loglog_slope(x, y) -> float:
    return float(np.polyfit(np.log(np.asarray(x, float)), np.log(np.asarray(y, float)), 1)[0])


def saddle_sweep(alpha: float, eps_list, kappa: float) -> list[dict]:
    """One row per eps: passage length and the orbit facts."""
    rows = []
    for eps in eps_list:
        orb = maximal_orbit(alpha, eps, kappa)
        ratio, slow, total = orbit_facts_check(orb)
        rows.append(dict(alpha=alpha, eps=eps, kappa=kappa, passage_length=orb.passage_length,
                         epsilon_l2_ratio=ratio, slow_fraction=slow, reciprocal_gap_sum=total))
    return rows
