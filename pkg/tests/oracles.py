"""High-precision reference computations shared by the tests.

The map is rebuilt here from scratch in mpmath: for l = 3 from the closed
form x - sin(2 pi x) / (2 pi), for general l by quadrature of the sine
power, so no coefficient code of the package is reused.
"""
from mpmath import mp


def f0_l3(x):
    return x - mp.sin(2 * mp.pi * x) / (2 * mp.pi)


def f0_quad(l):
    """F_0 by quadrature; call under the working precision it will be used at."""
    norm = mp.quad(lambda u: mp.sin(mp.pi * u) ** (l - 1), [0, 1])

    def f0(x):
        n = mp.floor(x)
        y = x - n
        # substitute u = y s so tiny y keeps full relative accuracy
        return n + y * mp.quad(lambda s: mp.sin(mp.pi * y * s) ** (l - 1), [0, 1]) / norm

    return f0


def iterate(f0, t, x, n):
    for _ in range(n):
        x = f0(x) + t
    return x


def jet(f0, t, x, n):
    """First three x-derivatives of the n-th iterate, by high-precision differencing."""
    g = lambda y: iterate(f0, t, y, n)  # noqa: E731
    return tuple(mp.diff(g, x, k) for k in (1, 2, 3))


def schwarzian(d1, d2, d3):
    return d3 / d1 - mp.mpf(3) / 2 * (d2 / d1) ** 2
