"""Dimension estimates for the parameters with irrational rotation number.

Three routes are provided:

* cover sums over the fundamental cells D(n_1, ..., n_r) of the harmonic
  coding, whose growth rate between depths gives a similarity dimension;
* box counting of the complement of all tongues up to a denominator;
* a mass distribution (Frostman) construction whose local bound
  mu(D) <= |D|^eta certifies the lower estimate on the retained cells.

Cells run between tongue centers. Synthetic self-similar cell trees with a
known dimension serve as oracles for the estimators.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from .errors import (
    CutoffTooSmallError,
    InsufficientDepthError,
    MissingCenterError,
    ScaleTooFineError,
)
from .farey import UNIT, FareyDomain, HarmonicCode, harmonic_endpoint, harmonic_refine

STABILITY_TOL = 0.05
RESOLUTION_FACTOR = 10.0
# fraction of a box by which interval ends may miss the grid and still align
ALIGN_SLACK = 1e-6


@dataclass(frozen=True)
class FundamentalCell:
    """Parameter interval of the harmonic code ``code`` (between tongue centers)."""

    code: HarmonicCode
    t_interval: tuple[float, float]
    depth: int
    domain: Optional[FareyDomain] = None

    @property
    def length(self) -> float:
        return self.t_interval[1] - self.t_interval[0]


@dataclass
class DimensionEstimate:
    method: str
    value: float
    scales: list
    diagnostics: list
    raw: float = math.nan
    extra: dict = field(default_factory=dict)


def _cell(atlas, code: HarmonicCode, d: FareyDomain) -> FundamentalCell:
    a, b = atlas.center(d.lo), atlas.center(d.hi)
    return FundamentalCell(code, (min(a, b), max(a, b)), len(code.symbols), d)


def enumerate_cells(atlas, r: int, k: int, base: FareyDomain = UNIT) -> list[FundamentalCell]:
    """All cells D(n_1, ..., n_r) with |n_i| <= k, in code order.

    Raises
    ------
    MissingCenterError
        If an endpoint center is absent from the atlas.
    """
    if r < 0 or k < 0:
        raise ValueError("depth and cutoff must be >= 0")
    level = [(HarmonicCode(), base)]
    for _ in range(r):
        level = [(code.child(n), harmonic_refine(d, n))
                 for code, d in level for n in range(-k, k + 1)]
    return [_cell(atlas, code, d) for code, d in level]


def cover_sum(cells: Sequence[FundamentalCell], beta: float) -> float:
    """Sum of |D|^beta over the cells."""
    if not 0 < beta <= 1:
        raise ValueError("beta must lie in (0, 1]")
    lengths = np.array([c.length for c in cells])
    return float(np.sum(lengths**beta))


# -- synthetic oracle -------------------------------------------------------------
@dataclass(frozen=True)
class SelfSimilarCells:
    """Each cell splits into ``m`` evenly spaced children of relative size ``s``.

    The limit set is a Cantor set of dimension log m / log(1/s).
    """

    m: int
    s: float

    def __post_init__(self):
        if self.m < 2 or not 0 < self.m * self.s < 1:
            raise ValueError("need m >= 2 and m * s < 1")

    @property
    def dimension(self) -> float:
        return math.log(self.m) / math.log(1.0 / self.s)

    def _children(self, a: float, b: float) -> list[tuple[float, float]]:
        L = b - a
        gap = (1.0 - self.m * self.s) / (self.m - 1)
        return [(a + L * j * (self.s + gap), a + L * (j * (self.s + gap) + self.s))
                for j in range(self.m)]

    def cells(self, r: int) -> list[FundamentalCell]:
        level = [(HarmonicCode(), (0.0, 1.0))]
        for _ in range(r):
            level = [(code.child(j), iv) for code, (a, b) in level
                     for j, iv in enumerate(self._children(a, b))]
        return [FundamentalCell(code, iv, r) for code, iv in level]

    def removed_intervals(self, r: int) -> np.ndarray:
        """Closed gaps removed in the first ``r`` construction steps."""
        out = []
        level = [(0.0, 1.0)]
        for _ in range(r):
            nxt = []
            for a, b in level:
                kids = self._children(a, b)
                out.extend((kids[j][1], kids[j + 1][0]) for j in range(self.m - 1))
                nxt.extend(kids)
            level = nxt
        return np.array(sorted(out))


# -- cover-sum root ----------------------------------------------------------------
def _cells_by_depth(source, r_max: int, k: int, base: FareyDomain) -> list[list[FundamentalCell]]:
    if isinstance(source, SelfSimilarCells):
        return [source.cells(r) for r in range(r_max + 1)]
    return [enumerate_cells(source, r, k, base) for r in range(r_max + 1)]


def _ratio_root(prev: np.ndarray, cur: np.ndarray, beta_grid) -> float:
    """beta in [0, 1] with sum |cur|^beta = sum |prev|^beta (clamped)."""
    def g(beta):
        return math.log(np.sum(cur**beta)) - math.log(np.sum(prev**beta))

    if beta_grid is not None:
        grid = np.asarray(beta_grid, float)
        vals = np.array([g(b) for b in grid])
        sign = np.nonzero(np.diff(np.sign(vals)))[0]
        if sign.size == 0:
            return float(np.clip(grid[np.argmin(np.abs(vals))], 0.0, 1.0))
        i = sign[0]
        return float(brentq(g, grid[i], grid[i + 1], xtol=1e-12))
    lo, hi = 1e-9, 1.0
    glo, ghi = g(lo), g(hi)
    if glo <= 0:
        return 0.0
    if ghi >= 0:
        return 1.0
    return float(brentq(g, lo, hi, xtol=1e-12))


def upper_dimension_estimate(source, r_max: int, k: int, beta_grid=None,
                             base: FareyDomain = UNIT,
                             stability: float = STABILITY_TOL) -> DimensionEstimate:
    """Exponent at which cover sums neither grow nor shrink between depths.

    For each depth r the root beta_r of sum_r |D|^beta = sum_{r-1} |D|^beta
    is found; the estimate is beta at ``r_max`` and the roots of the last
    two depths must agree within ``stability``. ``source`` is an atlas (cells
    restricted to |n_i| <= k) or a :class:`SelfSimilarCells` oracle.

    Raises
    ------
    InsufficientDepthError
        If the last two roots differ by more than ``stability``.
    """
    if r_max < 2:
        raise ValueError("r_max must be >= 2")
    by_depth = _cells_by_depth(source, r_max, k, base)
    lengths = [np.array([c.length for c in cells]) for cells in by_depth]
    roots = [_ratio_root(lengths[r - 1], lengths[r], beta_grid) for r in range(1, r_max + 1)]
    if abs(roots[-1] - roots[-2]) > stability:
        raise InsufficientDepthError(
            f"cover-sum roots {roots[-2]:.4f} and {roots[-1]:.4f} differ by more than {stability}"
        )
    value = float(np.clip(roots[-1], 0.0, 1.0))
    sums = [float(np.sum(L**value)) for L in lengths[1:]]
    return DimensionEstimate("cover_sum_root", value, list(range(1, r_max + 1)), roots,
                             raw=roots[-1], extra={"cover_sums": sums, "k": k})


# -- box counting ---------------------------------------------------------------------
def box_count(intervals: np.ndarray, eps: float, lo: float = 0.0, hi: float = 1.0) -> int:
    """Number of boxes [lo + i eps, lo + (i+1) eps] not contained in one closed interval.

    The intervals must be disjoint; a box touching the complement only at
    its boundary counts as covered.
    """
    total = int(math.ceil((hi - lo) / eps - ALIGN_SLACK))
    iv = np.asarray(intervals, float).reshape(-1, 2)
    if iv.size == 0:
        return total
    first = np.ceil((iv[:, 0] - lo) / eps - ALIGN_SLACK)
    last = np.floor((iv[:, 1] - lo) / eps + ALIGN_SLACK)
    covered = np.maximum(0.0, last - first).sum()
    return int(total - covered)


def box_dimension_intervals(intervals, eps_list, lo: float = 0.0,
                            hi: float = 1.0) -> DimensionEstimate:
    """Slope of log N(eps) against log(1/eps) for the complement of ``intervals``."""
    eps = np.asarray(sorted(eps_list, reverse=True), float)
    counts = [box_count(intervals, e, lo, hi) for e in eps]
    if min(counts) < 1:
        raise ValueError("some scale has no box meeting the complement")
    raw = float(np.polyfit(np.log(1.0 / eps), np.log(counts), 1)[0])
    return DimensionEstimate("box_count", float(np.clip(raw, 0.0, 1.0)), list(eps), counts, raw=raw)


def unresolved_width(atlas, q_max: int) -> float:
    """Extrapolated width of the widest tongue with denominator above q_max.

    Widths decay like q^-3, so the constant max(width * q^3) over the upper
    half of the measured denominators is carried to q_max + 1.
    """
    per_q: dict[int, float] = {}
    for t in atlas:
        q = t.rho.denominator
        if q <= q_max:
            per_q[q] = max(per_q.get(q, 0.0), t.width)
    upper = [q for q in per_q if q >= max(1, q_max // 2)]
    if not upper:
        return 0.0
    C = max(per_q[q] * q**3 for q in upper)
    return C / (q_max + 1) ** 3


def box_dimension(atlas, q_max: int, eps_list, check_resolution: bool = True) -> DimensionEstimate:
    """Box-counting dimension of [0, 1] minus the tongues with denominator <= q_max.

    Raises
    ------
    ScaleTooFineError
        If some eps is below ten times the extrapolated unresolved width.
    MissingCenterError
        If the atlas lacks a rational of denominator <= q_max.
    """
    from .farey import farey_sequence

    missing = [r for r in farey_sequence(q_max) if r not in atlas]
    if missing:
        raise MissingCenterError(f"atlas lacks {len(missing)} rationals up to q={q_max}, e.g. {missing[0]}")
    floor = RESOLUTION_FACTOR * unresolved_width(atlas, q_max)
    if check_resolution and min(eps_list) < floor:
        raise ScaleTooFineError(f"eps {min(eps_list):.3g} below resolved scale {floor:.3g}")
    intervals = np.array([(t.t_lo, t.t_hi) for t in atlas if t.rho.denominator <= q_max])
    est = box_dimension_intervals(intervals, eps_list)
    est.extra.update(q_max=q_max, resolved_scale=floor,
                     fingerprint=getattr(atlas, "fingerprint", ""))
    return est


# -- Frostman construction -------------------------------------------------------------------
@dataclass
class FrostmanMeasure:
    eta: float
    k: int
    weights: dict  # HarmonicCode -> mass


@dataclass
class FrostmanReport:
    measure: FrostmanMeasure
    passed: bool
    depth_masses: list
    max_excess: float  # max mu(D) / |D|^eta
    min_mass_margin: float  # min sum_children |C|^eta / |D|^eta
    min_gap_ratio: float
    violations: list


def frostman_check(atlas, eta: float, k: int, r_max: int,
                   base: FareyDomain = UNIT) -> FrostmanReport:
    """Build the mass distribution to depth ``r_max`` and verify mu(D) <= |D|^eta.

    Each retained child C of a cell D receives mu(D) |C|^eta / sum |C'|^eta
    (siblings C' with |n| <= k). The cutoff is validated at every visited
    cell through sum |C'|^eta >= |D|^eta. The gap ratio is the locking width
    of an endpoint shared by two retained siblings over the larger sibling.

    Raises
    ------
    CutoffTooSmallError
        If the mass inequality fails at some cell; ``cell`` names its code.
    """
    if not 0 < eta < 1 / 3:
        raise ValueError("eta must lie in (0, 1/3)")
    if k < 1 or r_max < 1:
        raise ValueError("k and r_max must be >= 1")
    root = _cell(atlas, HarmonicCode(), base)
    weights = {root.code: 1.0}
    level = [root]
    depth_masses = [1.0]
    margin, gap_ratio, excess = math.inf, math.inf, 0.0
    violations = []
    for _ in range(r_max):
        nxt = []
        for cell in level:
            kids = [_cell(atlas, cell.code.child(n), harmonic_refine(cell.domain, n))
                    for n in range(-k, k + 1)]
            powers = np.array([c.length for c in kids]) ** eta
            denom = float(powers.sum())
            ratio = denom / cell.length**eta
            margin = min(margin, ratio)
            if ratio < 1.0:
                raise CutoffTooSmallError(
                    f"sum of |child|^eta is {ratio:.4f} of |D|^eta at {cell.code or 'root'}",
                    cell=cell.code,
                )
            mass = weights[cell.code]
            for c, pw in zip(kids, powers):
                weights[c.code] = mass * pw / denom
            for n in range(-k + 1, k + 1):
                shared = harmonic_endpoint(cell.domain, n)
                width = atlas.get(shared).width
                left, right = kids[n + k], kids[n + k - 1]
                gap_ratio = min(gap_ratio, width / max(left.length, right.length))
            nxt.extend(kids)
        level = nxt
        depth_masses.append(float(sum(weights[c.code] for c in level)))
    for code, mass in weights.items():
        cell = _cell(atlas, code, code.domain(base))
        bound = cell.length**eta
        excess = max(excess, mass / bound)
        if mass > bound * (1 + 1e-12):
            violations.append(code)
    measure = FrostmanMeasure(eta, k, weights)
    return FrostmanReport(measure, not violations, depth_masses, excess, margin, gap_ratio,
                          violations)


def minimal_cutoff(atlas, eta: float, r_max: int, k_max: int,
                   base: FareyDomain = UNIT) -> int:
    """Smallest k <= k_max for which the mass inequality holds at every cell."""
    for k in range(1, k_max + 1):
        try:
            frostman_check(atlas, eta, k, r_max, base)
        except CutoffTooSmallError:
            continue
        return k
    raise CutoffTooSmallError(f"no cutoff up to {k_max} satisfies the mass inequality")
