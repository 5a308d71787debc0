"""Exact Farey-tree arithmetic: codes, turning points, harmonic subdivisions.

Everything here is integer arithmetic on :class:`fractions.Fraction`; no
floating point is involved. A Farey code is a string over ``{"L", "R"}``
describing the path from the root 1/2 to a rational in (0, 1).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional

from .errors import CodeLimitError

MAX_CODE_LENGTH = 64
MAX_PICK = 10**6

ZERO = Fraction(0)
ONE = Fraction(1)
HALF = Fraction(1, 2)


def as_rational(value) -> Fraction:
    """Coerce ``value`` to a Fraction in [0, 1]; strings like ``"3/8"`` are accepted."""
    r = Fraction(value)
    if not 0 <= r <= 1:
        raise ValueError(f"rational {r} outside [0, 1]")
    return r


def mediant(a: Fraction, b: Fraction) -> Fraction:
    return Fraction(a.numerator + b.numerator, a.denominator + b.denominator)


def _check_interior(r: Fraction) -> Fraction:
    r = Fraction(r)
    if not 0 < r < 1:
        raise ValueError(f"{r} is not in the open interval (0, 1)")
    return r


def farey_parents(r) -> tuple[Fraction, Fraction]:
    """Closest neighbours ``u < r < v`` in [0, 1] with denominators <= den(r).

    These are the two Farey neighbours used in the tree definition; they are
    found from the modular inverse of the numerator, so the cost is
    logarithmic in the denominator.
    """
    r = _check_interior(r)
    p, q = r.numerator, r.denominator
    # left neighbour a/b satisfies p*b - q*a = 1 with 0 < b <= q
    b = pow(p, -1, q)
    a = (p * b - 1) // q
    left = Fraction(a, b)
    right = Fraction(p - a, q - b)
    return left, right


def daughters(r) -> tuple[Fraction, Fraction]:
    """Left and right daughters of ``r`` in the Farey tree."""
    r = _check_interior(r)
    left, right = farey_parents(r)
    return mediant(left, r), mediant(r, right)


def mother(r) -> Optional[Fraction]:
    """Parent of ``r`` in the Farey tree, or None for the root 1/2."""
    r = _check_interior(r)
    if r == HALF:
        return None
    left, right = farey_parents(r)
    return left if left.denominator > right.denominator else right


def _check_code(code: str, max_length: int) -> str:
    if len(code) > max_length:
        raise CodeLimitError(f"code length {len(code)} exceeds limit {max_length}")
    bad = set(code) - {"L", "R"}
    if bad:
        raise ValueError(f"invalid code symbols {sorted(bad)}")
    return code


def code_to_rational(code: str, max_length: int = MAX_CODE_LENGTH) -> Fraction:
    """Decode a Farey code; the empty code is the root 1/2."""
    _check_code(code, max_length)
    lo, hi = ZERO, ONE
    cur = HALF
    for s in code:
        if s == "L":
            hi = cur
        else:
            lo = cur
        cur = mediant(lo, hi)
    return cur


def rational_to_code(r, max_length: int = MAX_CODE_LENGTH) -> str:
    """Path from the root to ``r`` as a string over ``{"L", "R"}``."""
    r = _check_interior(r)
    lo, hi = ZERO, ONE
    cur = HALF
    out = []
    while cur != r:
        if len(out) >= max_length:
            raise CodeLimitError(f"code of {r} is longer than {max_length}")
        if r < cur:
            out.append("L")
            hi = cur
        else:
            out.append("R")
            lo = cur
        cur = mediant(lo, hi)
    return "".join(out)


def turning_points(code: str) -> list[int]:
    """1-based turning points of a code.

    A turning point is an index ``i`` with ``a_i != a_{i+1}``; an alternation
    immediately following a turning point is skipped.
    """
    pts: list[int] = []
    i = 1
    while i < len(code):
        if code[i - 1] != code[i]:
            pts.append(i)
            i += 2
        else:
            i += 1
    return pts


def degree(code: str) -> int:
    return len(turning_points(code)) + 1


def closest_return_denominators(code: str, max_length: int = MAX_CODE_LENGTH) -> list[int]:
    """Denominators of the prefixes of ``code`` cut at each turning point."""
    _check_code(code, max_length)
    return [code_to_rational(code[:m]).denominator for m in turning_points(code)]


def is_farey_neighbor(a, b) -> bool:
    a, b = Fraction(a), Fraction(b)
    if a == b:
        raise ValueError("Farey neighbour test needs two distinct rationals")
    return abs(a.numerator * b.denominator - b.numerator * a.denominator) == 1


@dataclass(frozen=True)
class FareyDomain:
    """An interval ``(lo, hi)`` bounded by Farey neighbours."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        lo, hi = Fraction(self.lo), Fraction(self.hi)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        if not 0 <= lo < hi <= 1:
            raise ValueError(f"bad Farey domain ({lo}, {hi})")
        if not is_farey_neighbor(lo, hi):
            raise ValueError(f"({lo}, {hi}) are not Farey neighbours")
        if 0 < lo and hi < 1:
            ratio = Fraction(lo.denominator, hi.denominator)
            if not Fraction(1, 2) <= ratio <= 2:
                raise ValueError(f"({lo}, {hi}) violates the denominator ratio bound")

    @classmethod
    def parse(cls, text: str) -> "FareyDomain":
        """Parse ``"P/Q:P'/Q'"``."""
        lo, hi = text.split(":")
        return cls(Fraction(lo), Fraction(hi))

    def __str__(self):
        return f"{self.lo.numerator}/{self.lo.denominator}:{self.hi.numerator}/{self.hi.denominator}"

    def mirror(self) -> "FareyDomain":
        return FareyDomain(1 - self.hi, 1 - self.lo)


UNIT = FareyDomain(ZERO, ONE)


def _check_pick(n: int, max_pick: int) -> int:
    n = int(n)
    if abs(n) > max_pick:
        raise CodeLimitError(f"harmonic pick {n} exceeds limit {max_pick}")
    return n


def harmonic_endpoint(d: FareyDomain, n: int, max_pick: int = MAX_PICK) -> Fraction:
    """Endpoint ``u_n`` of the harmonic subdivision of ``d``.

    ``u_n`` tends to ``d.lo`` as n -> +inf and to ``d.hi`` as n -> -inf;
    ``u_0`` is the mediant.
    """
    n = _check_pick(n, max_pick)
    P, Q = d.lo.numerator, d.lo.denominator
    P2, Q2 = d.hi.numerator, d.hi.denominator
    if n >= 0:
        return Fraction((n + 1) * P + P2, (n + 1) * Q + Q2)
    return Fraction(P + (1 - n) * P2, Q + (1 - n) * Q2)


def harmonic_refine(d: FareyDomain, n: int, max_pick: int = MAX_PICK) -> FareyDomain:
    """The subdivision cell between ``u_{n+1}`` and ``u_n``."""
    a = harmonic_endpoint(d, n + 1, max_pick)
    b = harmonic_endpoint(d, n, max_pick)
    return FareyDomain(min(a, b), max(a, b))


@dataclass(frozen=True)
class HarmonicCode:
    """Sequence of subdivision picks, optionally closed by an endpoint pick.

    ``symbols[i] = n`` stands for the symbol S(n, n+1) and ``terminal = n``
    for E(n).
    """

    symbols: tuple[int, ...] = ()
    terminal: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(int(s) for s in self.symbols))

    def __len__(self):
        return len(self.symbols) + (self.terminal is not None)

    def __str__(self):
        parts = [f"S({n},{n + 1})" for n in self.symbols]
        if self.terminal is not None:
            parts.append(f"E({self.terminal})")
        return " ".join(parts)

    def domain(self, base: FareyDomain = UNIT, max_pick: int = MAX_PICK) -> FareyDomain:
        d = base
        for n in self.symbols:
            d = harmonic_refine(d, n, max_pick)
        return d

    def endpoint(self, base: FareyDomain = UNIT, max_pick: int = MAX_PICK) -> Fraction:
        if self.terminal is None:
            raise ValueError("code has no terminal E symbol")
        return harmonic_endpoint(self.domain(base, max_pick), self.terminal, max_pick)

    def child(self, n: int) -> "HarmonicCode":
        if self.terminal is not None:
            raise ValueError("cannot extend a terminated code")
        return HarmonicCode(self.symbols + (n,))

    def mirror(self) -> "HarmonicCode":
        """Image under the tree flip x -> 1 - x."""
        term = None if self.terminal is None else -self.terminal
        return HarmonicCode(tuple(-n - 1 for n in self.symbols), term)


def harmonic_endpoints(d: FareyDomain, n_lo: int, n_hi: int) -> Iterator[tuple[int, Fraction]]:
    for n in range(n_lo, n_hi + 1):
        yield n, harmonic_endpoint(d, n)


def farey_sequence(q_max: int) -> list[Fraction]:
    """All rationals in [0, 1] with denominator <= q_max, sorted."""
    if q_max < 1:
        raise ValueError("q_max must be >= 1")
    out = []
    a, b, c, d = 0, 1, 1, q_max
    out.append(Fraction(a, b))
    while c <= q_max:
        k = (q_max + b) // d
        a, b, c, d = c, d, k * c - a, k * d - b
        out.append(Fraction(a, b))
    return out


def tree_order(q_max: int) -> list[Fraction]:
    """Interior rationals with denominator <= q_max in breadth-first tree order."""
    out = []
    level = [HALF]
    while level:
        nxt = []
        for r in level:
            if r.denominator > q_max:
                continue
            out.append(r)
            nxt.extend(daughters(r))
        level = nxt
    return out
