"""Exact integer arithmetic: Seifert invariants, lens-space descent, resonances.

No floating point is used except to rationalize user input.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass
from fractions import Fraction
from math import gcd
from typing import Optional, Union

Rational = Union[int, Fraction, str, float]

DENOMINATOR_CAP = 10**6


class ArithmeticInputError(ValueError):
    pass


def ext_gcd(a: int, b: int):
    """(g, x, y) with a x + b y = g = gcd(a, b)."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


@dataclass(frozen=True)
class SeifertData:
    genus: int
    p1: int
    p2: int
    q1p: int
    q2p: int
    b: int
    q1: int
    q2: int
    m1: int
    m2: int

    def euler_number(self) -> Fraction:
        return self.b + Fraction(self.q1, self.p1) + Fraction(self.q2, self.p2)

    def to_dict(self):
        return asdict(self)


def _check_positive_int(name, v):
    if isinstance(v, bool) or not isinstance(v, int) or v < 1:
        raise ArithmeticInputError(f"{name} must be a positive integer, got {v!r}")


def seifert_invariants(p1: int, p2: int) -> SeifertData:
    """Seifert data of the fibration of S^3 by curves hitting (p1, p2).

    Solves p1 q2' + p2 q1' = 1.  q2' is determined modulo p2, and the
    representative 0 <= q2' < p2 is taken; normalised data do not depend
    on this choice.
    """
    _check_positive_int("p1", p1)
    _check_positive_int("p2", p2)
    g, x, _ = ext_gcd(p1, p2)
    if g != 1:
        raise ArithmeticInputError(f"p1 = {p1} and p2 = {p2} are not coprime")
    q2p = x % p2  # p1 * x = 1 mod p2
    q1p = (1 - p1 * q2p) // p2
    m1, q1 = divmod(q1p, p1)
    m2, q2 = divmod(q2p, p2)
    return SeifertData(0, p1, p2, q1p, q2p, m1 + m2, q1, q2, m1, m2)


def brute_force_invariants(p1: int, p2: int) -> SeifertData:
    """Oracle: search q2' directly instead of running Euclid."""
    for q2p in range(-(p1 + p2), p1 + p2 + 1):
        rest = 1 - p1 * q2p
        if rest % p2 == 0 and 0 <= q2p < p2:
            q1p = rest // p2
            m1, q1 = q1p // p1, q1p % p1
            m2, q2 = q2p // p2, q2p % p2
            return SeifertData(0, p1, p2, q1p, q2p, m1 + m2, q1, q2, m1, m2)
    raise ArithmeticInputError(f"no solution for ({p1}, {p2})")


def to_fraction(a: Rational) -> Fraction:
    if isinstance(a, Fraction):
        return a
    if isinstance(a, bool):
        raise ArithmeticInputError("booleans are not rationals")
    if isinstance(a, int):
        return Fraction(a)
    if isinstance(a, str):
        try:
            return Fraction(a.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ArithmeticInputError(f"cannot parse rational {a!r}: {exc}") from None
    if isinstance(a, float):
        return Fraction(a).limit_denominator(DENOMINATOR_CAP)
    raise ArithmeticInputError(f"unsupported rational input {a!r}")


def from_rational_a(a: Rational) -> SeifertData:
    fa = to_fraction(a)
    if not (0 < fa < 1):
        raise ArithmeticInputError(f"a = {fa} must lie in (0, 1)")
    ratio = fa / (1 - fa)
    return seifert_invariants(ratio.numerator, ratio.denominator)


@dataclass(frozen=True)
class LensDescent:
    """Regular and exceptional fibre lengths are stored as multiples of 2 pi."""

    k1: int
    k2: int
    p1: int
    p2: int
    m: int
    regular_fiber_len: Fraction
    multiple_fiber_lens: tuple
    multiplicities: tuple
    theta_witness: tuple

    def to_dict(self):
        return {
            "k1": self.k1,
            "k2": self.k2,
            "p1": self.p1,
            "p2": self.p2,
            "m": self.m,
            "regular_fiber_len_over_2pi": str(self.regular_fiber_len),
            "multiple_fiber_lens_over_2pi": [str(x) for x in self.multiple_fiber_lens],
            "multiplicities": list(self.multiplicities),
            "theta_witness": list(self.theta_witness),
        }


def _min_theta(p1, p2, m):
    """Smallest theta/(2 pi) in (0, 1] solving

        p1 theta = 2 pi (k/m + l1),   p2 theta = 2 pi (-k/m + l2)

    with k in 1..m, l1 in 0..p1-1, l2 in 1..p2.  Returns (theta/(2 pi), k, l1, l2).
    """
    best = None
    for k in range(1, m + 1):
        for l1 in range(0, p1):
            th = (Fraction(k, m) + l1) / p1
            if not (0 < th <= 1):
                continue
            l2 = p2 * th + Fraction(k, m)
            if l2.denominator == 1 and 1 <= l2 <= p2:
                if best is None or th < best[0]:
                    best = (th, k, l1, int(l2))
    return best


def descend_lens(k1: int, k2: int) -> LensDescent:
    _check_positive_int("k1", k1)
    _check_positive_int("k2", k2)
    g = gcd(k1, k2)
    p1, p2 = k1 // g, k2 // g
    m = k1 + k2
    regular = Fraction(1, p1 + p2)
    multiple = (Fraction(1, p1 * m), Fraction(1, p2 * m))
    mult = tuple(regular / L for L in multiple)
    if any(x.denominator != 1 for x in mult):
        raise ArithmeticError("multiplicities are not integral")
    mult = tuple(int(x) for x in mult)
    witness = _min_theta(p1, p2, m)
    if witness is None or witness[0] != regular:
        raise ArithmeticError(f"minimal theta {witness} does not match 2pi/(p1+p2)")
    return LensDescent(k1, k2, p1, p2, m, regular, multiple, mult, (str(witness[0]),) + witness[1:])


RESONANCE_TOL = 1e-12


@dataclass(frozen=True)
class Resonance:
    n: int
    mirror: bool = False


def _integer_ratio(r):
    if isinstance(r, Fraction):
        return int(r) if r.denominator == 1 else None
    k = round(r.real)
    if abs(r.imag) <= RESONANCE_TOL and abs(r.real - k) <= RESONANCE_TOL * max(1.0, abs(k)):
        return int(k)
    return None


def resonance_check(a) -> Optional[Resonance]:
    """Resonance z2^n d/dz1 when a/(1-a) = n >= 2, or the mirror case (1-a)/a = n."""
    if isinstance(a, (Fraction, str, int)) and not isinstance(a, bool):
        fa = to_fraction(a)
        if not (0 < fa < 1):
            return None
        ratios = (fa / (1 - fa), (1 - fa) / fa)
    else:
        a = complex(a)
        if a == 0 or a == 1:
            return None
        ratios = (a / (1 - a), (1 - a) / a)
    for mirror, r in zip((False, True), ratios):
        k = _integer_ratio(r)
        if k is not None and k >= 2:
            return Resonance(k, mirror)
    return None
