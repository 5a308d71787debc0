"""Empirical Hölder continuity of the rotation number and the zeta diagnostics.

Rotation numbers are read at tongue centers, where rho is exactly the
rational of the tongue, so no ergodic-average noise enters the fit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .family import CriticalFamily
from .farey import FareyDomain, as_rational, harmonic_endpoint

ZETA_ALPHA = 0.25


def zeta(atlas, u, w, alpha: float) -> float:
    """zeta(u, w) = |u - w| |c(u) - c(w)|^(-alpha) from atlas centers.

    Raises
    ------
    MissingCenterError
        If the atlas lacks u or w.
    """
    u, w = as_rational(u), as_rational(w)
    if u == w:
        raise ValueError("zeta needs two distinct rationals")
    dc = abs(atlas.center(u) - atlas.center(w))
    return float(abs(u - w)) * dc ** (-alpha)


def zeta_ratios(atlas, domain: FareyDomain, alpha: float, n_max: int) -> dict[tuple[int, int], float]:
    """zeta(u_i, u_j) / zeta(P/Q, P'/Q') over endpoint pairs with i*j >= 0, |i|, |j| <= n_max."""
    if alpha > 0.5:
        raise ValueError("alpha must be <= 1/2")
    base = zeta(atlas, domain.lo, domain.hi, alpha)
    pts = {n: harmonic_endpoint(domain, n) for n in range(-n_max, n_max + 1)}
    out = {}
    for i in pts:
        for j in pts:
            if i < j and i * j >= 0:
                out[(i, j)] = zeta(atlas, pts[i], pts[j], alpha) / base
    return out


def zeta_uniformity(atlas, domain: FareyDomain, alpha: float = ZETA_ALPHA, n_max: int = 16) -> float:
    """Largest zeta ratio over same-side endpoint pairs of the harmonic subdivision."""
    return max(zeta_ratios(atlas, domain, alpha, n_max).values())


def adjacent_zeta_ratios(atlas, domain: FareyDomain, alpha: float = ZETA_ALPHA,
                         n_max: int = 16) -> dict[int, float]:
    """zeta(u_{n+1}, u_n) / zeta(P/Q, P'/Q') for -n_max <= n <= n_max."""
    base = zeta(atlas, domain.lo, domain.hi, alpha)
    return {n: zeta(atlas, harmonic_endpoint(domain, n + 1), harmonic_endpoint(domain, n), alpha) / base
            for n in range(-n_max, n_max + 1)}


@dataclass
class HolderFit:
    alpha: float
    c_const: float
    scales: np.ndarray  # dyadic bin edges 2^-j of the actual gaps
    max_drho: np.ndarray  # per-bin maximum of |delta rho|
    worst_pair: tuple[Fraction, Fraction]
    pairs: np.ndarray  # columns t1, t2, rho1, rho2
    slope: float
    intercept: float

    def envelope_holds(self) -> bool:
        gap = np.abs(self.pairs[:, 1] - self.pairs[:, 0])
        drho = np.abs(self.pairs[:, 3] - self.pairs[:, 2])
        return bool(np.all(drho <= self.c_const * gap**self.alpha))

    def fitted(self) -> np.ndarray:
        return np.exp(self.intercept) * self.scales**self.slope


def holder_fit(fam, atlas, scale_count: int = 10, pairs_per_scale: int = 1000,
               seed: int = 0, first_scale: int = 2) -> HolderFit:
    """Fit |rho(x) - rho(y)| <= c |x - y|^alpha on center pairs at dyadic gaps.

    For each nominal gap 2^-j, j = first_scale, ..., a random center is
    paired with the center nearest to it plus or minus the gap. Pairs are
    then binned by their actual gap into [2^-j-1, 2^-j); the exponent is the
    log-log slope of the per-bin maxima of |delta rho| against 2^-j, clamped
    to (0, 1], and the constant is raised until the bound holds on every
    sampled pair. Coincident centers are dropped.
    """
    if scale_count < 4:
        raise ValueError("scale_count must be >= 4")
    if isinstance(fam, CriticalFamily) and (atlas.family, atlas.l) != (fam.name, fam.critical_exponent):
        raise ValueError("atlas was built for a different family")
    tongues = list(atlas)
    c = np.array([t.center for t in tongues])
    rho = np.array([float(t.rho) for t in tongues])
    rng = np.random.default_rng(seed)
    js = np.arange(first_scale, first_scale + scale_count)
    ii, jj = [], []
    for gap in 2.0 ** -js:
        i = rng.integers(0, len(c), pairs_per_scale)
        target = c[i] + rng.choice([-1.0, 1.0], pairs_per_scale) * gap
        j = np.clip(np.searchsorted(c, target), 1, len(c) - 1)
        j = np.where(np.abs(c[j - 1] - target) < np.abs(c[j] - target), j - 1, j)
        ii.append(i)
        jj.append(j)
    i, j = np.concatenate(ii), np.concatenate(jj)
    gap = np.abs(c[j] - c[i])
    keep = gap > 0
    i, j, gap = i[keep], j[keep], gap[keep]
    drho = np.abs(rho[j] - rho[i])
    bins = np.floor(-np.log2(gap)).astype(int)
    scales, maxima = [], []
    for b in js:
        sel = bins == b
        if sel.any() and drho[sel].max() > 0:
            scales.append(2.0**-b)
            maxima.append(drho[sel].max())
    scales, maxima = np.array(scales), np.array(maxima)
    slope, intercept = np.polyfit(np.log(scales), np.log(maxima), 1)
    alpha = float(min(max(slope, 1e-6), 1.0))
    ratio = drho / gap**alpha
    worst = int(np.argmax(ratio))
    c_const = max(math.exp(intercept), float(ratio[worst]))
    # a last-ulp nudge so the stored constant reproduces the bound exactly
    while not np.all(drho <= c_const * gap**alpha):
        c_const = float(np.nextafter(c_const, np.inf))
    pairs = np.column_stack([c[i], c[j], rho[i], rho[j]])
    return HolderFit(alpha, float(c_const), scales, maxima,
                     (tongues[i[worst]].rho, tongues[j[worst]].rho), pairs,
                     float(slope), float(intercept))
