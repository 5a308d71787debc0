import math
from fractions import Fraction as F

import numpy as np
import pytest
from mpmath import mp

from critcircle.errors import ResolutionError
from critcircle.family import AffineFamily, CriticalFamily
from critcircle.farey import UNIT, FareyDomain, HarmonicCode, farey_sequence, harmonic_endpoint
from critcircle.rotation import (
    Comparison,
    birkhoff_rotation_number,
    center,
    closest_returns_dynamical,
    compare_grid,
    compare_to_rational,
    extrema,
    locking_interval,
    param_derivative_report,
    param_harmonic_code,
    tongue,
)

TWO_PI = 2 * math.pi


@pytest.fixture(scope="module")
def fam():
    return CriticalFamily(3)


def test_birkhoff_examples(fam):
    rho, err = birkhoff_rotation_number(fam, 0.5, 10_000)
    assert err == 1e-4 and abs(rho - 0.5) <= err
    assert birkhoff_rotation_number(fam, 0.0, 50)[0] == 0.0
    for t in (0.013, 0.2, 0.3719):
        a, e = birkhoff_rotation_number(fam, t, 2000)
        b, _ = birkhoff_rotation_number(fam, 1 - t, 2000)
        assert abs(a + b - 1) <= 2 * e


def test_birkhoff_monotone_within_error_bars(fam):
    ts = np.linspace(0, 1, 400)
    est = np.array([birkhoff_rotation_number(fam, t, 500)[0] for t in ts])
    assert np.all(np.diff(est) >= -2 / 500)


@pytest.mark.parametrize("t, expected", [(0.10, Comparison.LOCKED), (0.20, Comparison.ABOVE),
                                         (0.0, Comparison.LOCKED)])
def test_compare_examples(fam, t, expected):
    assert compare_to_rational(fam, t, F(0)) is expected


def test_compare_unresolved_at_exact_boundary(fam):
    with pytest.raises(ResolutionError):
        compare_to_rational(fam, 1 / TWO_PI, F(0))


def test_compare_q_max(fam):
    with pytest.raises(ValueError):
        compare_to_rational(fam, 0.3, F(1, 50), q_max=32)


def test_arc_and_circle_searches_agree(fam):
    """The arc shortcut and the full-circle grid are two routes to the same sign."""
    rng = np.random.default_rng(1)
    for r in (F(1, 3), F(2, 7), F(5, 12), F(8, 13)):
        for t in rng.uniform(0, 1, 25):
            try:
                a = compare_to_rational(fam, t, r, region="arc")
                b = compare_to_rational(fam, t, r, region="circle")
            except ResolutionError:
                continue
            assert a is b
            if a is Comparison.LOCKED:
                arc, circ = extrema(fam, t, r, "arc"), extrema(fam, t, r, "circle")
                assert arc[0] == pytest.approx(circ[0], abs=1e-10)
                assert arc[1] == pytest.approx(circ[1], abs=1e-10)


def test_compare_grid_monotone(fam):
    ts = np.linspace(0, 1, 2000)
    for r in (F(1, 2), F(2, 5), F(3, 11), F(13, 21)):
        codes = compare_grid(fam, ts, r)
        seen = codes[codes != 2]
        assert np.all(np.diff(seen) >= 0)
        assert {-1, 0, 1} <= set(seen.tolist())


def test_zero_tongue_closed_form(fam):
    lo, hi = locking_interval(fam, F(0), 1e-10)
    assert lo == 0.0
    assert hi == pytest.approx(1 / TWO_PI, abs=1e-10)
    lo1, hi1 = locking_interval(fam, F(1), 1e-10)
    assert hi1 == 1.0 and lo1 == pytest.approx(1 - 1 / TWO_PI, abs=1e-10)


def test_half_tongue_symmetric(fam):
    lo, hi = locking_interval(fam, F(1, 2), 1e-10)
    assert lo + hi == pytest.approx(1.0, abs=1e-9)
    assert center(fam, F(1, 2)) == pytest.approx(0.5, abs=1e-12)


def test_refined_interval_agrees_within_tolerance(fam):
    for r in (F(1, 3), F(3, 7)):
        lo, hi = locking_interval(fam, r, 1e-8)
        lo2, hi2 = locking_interval(fam, r, 1e-9)
        assert abs(lo2 - lo) <= 1e-8 and abs(hi2 - hi) <= 1e-8


def test_center_examples(fam):
    assert center(fam, F(0)) == 0.0
    assert center(fam, F(1)) == 1.0


def test_center_is_periodic_and_locked_to_q32(fam):
    for r in farey_sequence(32):
        tg = tongue(fam, r)
        p, q = r.numerator, r.denominator
        assert abs(fam.iterate_real(tg.center, 0.0, q) - p) <= 1e-13 * q + 1e-15
        assert tg.t_lo <= tg.center <= tg.t_hi
        if 0 < r < 1:
            assert compare_to_rational(fam, tg.center, r) is Comparison.LOCKED
            assert compare_to_rational(fam, tg.t_lo - 1e-9, r) is Comparison.BELOW
            assert compare_to_rational(fam, tg.t_hi + 1e-9, r) is Comparison.ABOVE


def test_center_symmetry_to_q32(fam):
    for r in farey_sequence(32):
        assert center(fam, r) + center(fam, 1 - r) == pytest.approx(1.0, abs=1e-9)


def test_param_harmonic_code_terminal_at_endpoint(fam):
    code = param_harmonic_code(fam, center(fam, F(1, 2)), 1)
    assert code == HarmonicCode((), 0)


def test_param_harmonic_code_matches_center_lookup(fam):
    code = param_harmonic_code(fam, 0.61, 1)
    (n,) = code.symbols
    a = center(fam, harmonic_endpoint(UNIT, n + 1))
    b = center(fam, harmonic_endpoint(UNIT, n))
    assert min(a, b) < 0.61 < max(a, b)


def test_param_harmonic_code_mirror(fam):
    for t in (0.197, 0.29, 0.4421, 0.61, 0.83):
        code = param_harmonic_code(fam, t, 2)
        assert param_harmonic_code(fam, 1 - t, 2) == code.mirror()


def test_param_harmonic_code_rejects_endpoint_locking(fam):
    with pytest.raises(ValueError):
        param_harmonic_code(fam, 0.1, 1)


def _convergent_denominators(x, count):
    """Continued-fraction denominators of x, computed in 50-digit arithmetic."""
    with mp.workdps(50):
        out, q0, q1 = [], 0, 1
        y = x
        while len(out) < count + 1:
            a = int(mp.floor(1 / y))
            y = 1 / y - a
            q0, q1 = q1, a * q1 + q0
            out.append(q1)
    return sorted(set([1] + out))[:count]


def test_closest_returns_golden_rigid():
    rho = (3 - math.sqrt(5)) / 2
    assert closest_returns_dynamical(AffineFamily(1.0), rho, 7) == [1, 2, 3, 5, 8, 13, 21]


@pytest.mark.parametrize("a, b, c", [(a, b, c) for a, b, c in [
    (-1, 2, 1), (-1, 3, 1), (-2, 5, 1), (-2, 6, 1), (-2, 7, 1), (-3, 10, 1), (-3, 11, 1),
    (-3, 13, 2), (-1, 5, 2), (-1, 5, 4), (-2, 8, 1), (-4, 17, 1), (-4, 19, 1), (-1, 7, 3),
    (-5, 26, 1), (-5, 28, 1), (-1, 13, 3), (-6, 37, 1), (-1, 17, 4), (-2, 11, 3)]])
def test_closest_returns_rigid_quadratic_irrationals(a, b, c):
    x = (a + mp.sqrt(b)) / c
    x = x - mp.floor(x)
    expected = _convergent_denominators(x, 6)
    got = closest_returns_dynamical(AffineFamily(1.0), float(x), 6)
    assert got == expected


def test_closest_returns_near_half(fam):
    lo, hi = locking_interval(fam, F(1, 2))
    out = closest_returns_dynamical(fam, hi + 1e-4, 4)
    assert out[:2] == [1, 2]
    assert out == sorted(out)


def test_param_derivative_unit_domain_is_trivial(fam):
    rep = param_derivative_report(fam, UNIT, samples=20)
    assert np.allclose(rep.chain, 1.0) and rep.spread == pytest.approx(1.0)
    assert rep.fd_max_rel_err < 1e-6


def test_param_derivative_depth_two(fam):
    d = HarmonicCode((1, -2)).domain()
    rep = param_derivative_report(fam, d, samples=100)
    assert rep.fd_max_rel_err < 1e-6
    assert 1 <= rep.spread < 1e3
