"""Compiled inner loops for the sine-power critical family.

Family parameters travel as ``(l, coeffs, taylor, small, inv_norm)``:

* ``l``        odd critical exponent
* ``coeffs``   cosine coefficients a_0..a_m of F_0' in cos(2 pi k x), a_0 = 1
* ``taylor``   odd Taylor coefficients of F_0 at 0
* ``small``    radius below which the series replaces the cancelling closed form
* ``inv_norm`` 1 / mean(sin^{l-1}(pi x))

A lift point is carried as an integer winding part ``k`` and a fraction
``y`` in [0, 1).
"""
import math

import numpy as np
from numba import njit

PI = math.pi
TWO_PI = 2.0 * math.pi

@njit(cache=True, inline="always")
def f0_centered(l, coeffs, taylor, small, inv_norm, y):
    """F_0(y) for y in [-1/2, 1/2]."""
    if abs(y) < small:
        # odd series sum_j taylor[j] y^(2j+1); leading terms vanish to order l
        y2 = y * y
        acc = 0.0
        for j in range(taylor.shape[0] - 1, -1, -1):
            acc = acc * y2 + taylor[j]
        return acc * y
    theta = TWO_PI * y
    s1 = math.sin(theta)
    acc = y + coeffs[1] * s1 / TWO_PI
    if coeffs.shape[0] > 2:
        c1 = math.cos(theta)
        sk, ck = s1, c1
        for k in range(2, coeffs.shape[0]):
            sk, ck = sk * c1 + ck * s1, ck * c1 - sk * s1
            acc += coeffs[k] * sk / (TWO_PI * k)
    return acc


@njit(cache=True, inline="always")
def step(l, coeffs, taylor, small, inv_norm, t, k, y):
    if y < 0.5:
        shift = 0
        yc = y
    else:
        shift = 1
        yc = y - 1.0
    v = f0_centered(l, coeffs, taylor, small, inv_norm, yc) + t
    j = math.floor(v)
    ny = v - j
    nk = k + shift + np.int64(j)
    if ny >= 1.0:
        ny -= 1.0
        nk += 1
    return nk, ny


@njit(cache=True)
def split(x):
    k = math.floor(x)
    y = x - k
    if y >= 1.0:
        y -= 1.0
        k += 1
    return np.int64(k), y


@njit(cache=True)
def iterate(l, coeffs, taylor, small, inv_norm, t, k, y, n):
    for _ in range(n):
        k, y = step(l, coeffs, taylor, small, inv_norm, t, k, y)
    return k, y


@njit(cache=True)
def iterate_real(l, coeffs, taylor, small, inv_norm, t, x, n):
    k, y = split(x)
    k, y = iterate(l, coeffs, taylor, small, inv_norm, t, k, y, n)
    return k + y


@njit(cache=True)
def iterate_many(l, coeffs, taylor, small, inv_norm, t, xs, n):
    out = np.empty(xs.shape[0])
    for i in range(xs.shape[0]):
        out[i] = iterate_real(l, coeffs, taylor, small, inv_norm, t, xs[i], n)
    return out


@njit(cache=True)
def orbit(l, coeffs, taylor, small, inv_norm, t, k, y, n):
    """Winding parts and fractions of x, f(x), ..., f^n(x)."""
    ks = np.empty(n + 1, dtype=np.int64)
    ys = np.empty(n + 1)
    ks[0] = k
    ys[0] = y
    for i in range(n):
        k, y = step(l, coeffs, taylor, small, inv_norm, t, k, y)
        ks[i + 1] = k
        ys[i + 1] = y
    return ks, ys


@njit(cache=True)
def derivs(l, inv_norm, y):
    """F_0', F_0'', F_0''' at a fractional position y (sine-power form)."""
    s = math.sin(PI * y)
    c = math.cos(PI * y)
    m = l - 1
    d1 = s**m * inv_norm
    d2 = m * PI * s ** (m - 1) * c * inv_norm
    d3 = m * PI * PI * ((m - 1) * s ** (m - 2) * c * c - s**m) * inv_norm
    return d1, d2, d3


@njit(cache=True)
def chain(l, coeffs, taylor, small, inv_norm, t, x, n):
    """Derivative, Schwarzian and nonlinearity of f^n at x via composition sums.

    Also returns the smallest |f'| met along the orbit so the caller can flag
    a degenerate chain.
    """
    k, y = split(x)
    dprod = 1.0
    schw = 0.0
    nonlin = 0.0
    dmin = np.inf
    for _ in range(n):
        d1, d2, d3 = derivs(l, inv_norm, y)
        if abs(d1) < dmin:
            dmin = abs(d1)
        if d1 == 0.0:
            return 0.0, np.nan, np.nan, 0.0
        nf = d2 / d1
        sf = d3 / d1 - 1.5 * nf * nf
        schw += sf * dprod * dprod
        nonlin += nf * dprod
        dprod *= d1
        k, y = step(l, coeffs, taylor, small, inv_norm, t, k, y)
    return dprod, schw, nonlin, dmin


@njit(cache=True)
def param_chain(l, coeffs, taylor, small, inv_norm, t, x, n):
    """d f^n / dt at x as sum_{i=1}^{n} Df^{n-i}(f^i(x)) (suffix products)."""
    k, y = split(x)
    ders = np.empty(n)
    for i in range(n):
        ders[i] = derivs(l, inv_norm, y)[0]
        k, y = step(l, coeffs, taylor, small, inv_norm, t, k, y)
    total = 0.0
    suffix = 1.0
    # term i uses the derivatives at f^i .. f^{n-1}
    for i in range(n, 0, -1):
        total += suffix
        suffix *= ders[i - 1]
    return total


@njit(cache=True)
def displacement(l, coeffs, taylor, small, inv_norm, t, x, p, q):
    """g(x) = f^q(x) - x - p."""
    k, y = split(x)
    k2, y2 = iterate(l, coeffs, taylor, small, inv_norm, t, k, y, q)
    return (k2 - k - p) + (y2 - y)


@njit(cache=True)
def _golden(l, coeffs, taylor, small, inv_norm, t, p, q, a, b, sign, xtol):
    """Minimise sign*g on [a, b] by golden-section search; returns sign*min."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc = sign * displacement(l, coeffs, taylor, small, inv_norm, t, c, p, q)
    fd = sign * displacement(l, coeffs, taylor, small, inv_norm, t, d, p, q)
    best = min(fc, fd)
    it = 0
    while b - a > xtol and it < 200:
        it += 1
        if fc < fd:
            b = d
            d = c
            fd = fc
            c = b - invphi * (b - a)
            fc = sign * displacement(l, coeffs, taylor, small, inv_norm, t, c, p, q)
            if fc < best:
                best = fc
        else:
            a = c
            c = d
            fc = fd
            d = a + invphi * (b - a)
            fd = sign * displacement(l, coeffs, taylor, small, inv_norm, t, d, p, q)
            if fd < best:
                best = fd
    return best


@njit(cache=True)
def extrema_on(l, coeffs, taylor, small, inv_norm, t, p, q, a, b, npts, xtol, which=0):
    """Min and max of f^q(x) - x - p over [a, b]: grid, then golden refinement.

    ``which`` = -1 (+1) refines only the minimum (maximum); the other value is
    then the raw grid extremum.
    """
    xs = np.linspace(a, b, npts)
    vals = np.empty(npts)
    for i in range(npts):
        vals[i] = displacement(l, coeffs, taylor, small, inv_norm, t, xs[i], p, q)
    imin = np.argmin(vals)
    imax = np.argmax(vals)
    gmin = vals[imin]
    gmax = vals[imax]
    if which <= 0:
        lo = xs[max(imin - 1, 0)]
        hi = xs[min(imin + 1, npts - 1)]
        r = _golden(l, coeffs, taylor, small, inv_norm, t, p, q, lo, hi, 1.0, xtol)
        if r < gmin:
            gmin = r
    if which >= 0:
        lo = xs[max(imax - 1, 0)]
        hi = xs[min(imax + 1, npts - 1)]
        r = -_golden(l, coeffs, taylor, small, inv_norm, t, p, q, lo, hi, -1.0, xtol)
        if r > gmax:
            gmax = r
    return gmin, gmax


@njit(cache=True)
def critical_arc(l, coeffs, taylor, small, inv_norm, t, q):
    """Right end of the arc from 0 to its nearest neighbour among f(0)..f^{q-1}(0)."""
    k = np.int64(0)
    y = 0.0
    b = 1.0
    for _ in range(q - 1):
        k, y = step(l, coeffs, taylor, small, inv_norm, t, k, y)
        if 0.0 < y < b:
            b = y
    return b


@njit(cache=True)
def center_bisect(l, coeffs, taylor, small, inv_norm, p, q, lo, hi, tol, max_iter):
    """Solve f_t^q(0) = p for t in [lo, hi] by bisection.

    Stops once the bracket is below ``tol`` and the residual below ``tol * q``,
    or when the bracket reaches adjacent doubles; returns the probed t with
    the smallest residual.
    """
    it = 0
    best_t, best_r = 0.5 * (lo + hi), np.inf
    while it < max_iter:
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            break
        k, y = iterate(l, coeffs, taylor, small, inv_norm, mid, np.int64(0), 0.0, q)
        r = (k - p) + y
        if abs(r) < best_r:
            best_t, best_r = mid, abs(r)
        if hi - lo <= tol and abs(r) <= tol * q:
            break
        if r < 0.0:
            lo = mid
        else:
            hi = mid
        it += 1
    return best_t, it


@njit(cache=True)
def preimage_bisect(l, coeffs, taylor, small, inv_norm, t, target, n, lo, hi, tol):
    """Solve f^n(y) = target for y in [lo, hi] (f^n increasing)."""
    it = 0
    while hi - lo > tol and it < 200:
        mid = 0.5 * (lo + hi)
        if iterate_real(l, coeffs, taylor, small, inv_norm, t, mid, n) < target:
            lo = mid
        else:
            hi = mid
        it += 1
    return 0.5 * (lo + hi)


@njit(cache=True)
def compare_grid(l, coeffs, taylor, small, inv_norm, ts, p, q, npts, xtol, eps):
    """Vectorised comparison codes over a parameter grid (-1, 0, +1, 2=unresolved)."""
    out = np.empty(ts.shape[0], dtype=np.int64)
    for i in range(ts.shape[0]):
        t = ts[i]
        b = critical_arc(l, coeffs, taylor, small, inv_norm, t, q)
        gmin, gmax = extrema_on(l, coeffs, taylor, small, inv_norm, t, p, q, 0.0, b, npts, xtol)
        if gmax < -eps:
            out[i] = -1
        elif gmin > eps:
            out[i] = 1
        elif gmin < -eps and gmax > eps:
            out[i] = 0
        else:
            out[i] = 2
    return out
