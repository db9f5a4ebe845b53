"""Wigner 3-j and 6-j symbols.

Angular momenta are handled internally as twice-the-value integers, so that
half-integer momenta never pass through floating point. The Racah sums are
accumulated in exact rational arithmetic and only the final square root is
taken in floating point.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from numbers import Real

__all__ = ["twice", "triangle", "wigner3j", "wigner6j", "clebsch_gordan"]


def twice(value: Real) -> int:
    """Return ``2 * value`` as an int, rejecting anything that is not a half-integer."""
    doubled = 2 * Fraction(value)
    if doubled.denominator != 1:
        raise ValueError(f"{value!r} is not an integer or half-integer")
    return int(doubled)


def triangle(ta: int, tb: int, tc: int) -> bool:
    """Triangle condition on twice-values (parity is checked separately)."""
    return abs(ta - tb) <= tc <= ta + tb


@lru_cache(maxsize=None)
def _fact(n: int) -> int:
    return math.factorial(n)


def _delta_sq(ta: int, tb: int, tc: int) -> Fraction:
    # twice-values with an even sum, so every half-sum below is an integer
    return Fraction(
        _fact((ta + tb - tc) // 2) * _fact((ta - tb + tc) // 2) * _fact((-ta + tb + tc) // 2),
        _fact((ta + tb + tc) // 2 + 1),
    )


def _signed_sqrt(coeff: Fraction, radicand: Fraction) -> float:
    if coeff == 0:
        return 0.0
    return float(coeff) * math.sqrt(radicand)


@lru_cache(maxsize=65536)
def _wigner3j_twice(j1: int, j2: int, j3: int, m1: int, m2: int, m3: int) -> float:
    if m1 + m2 + m3 != 0:
        return 0.0
    if not triangle(j1, j2, j3):
        return 0.0
    if abs(m1) > j1 or abs(m2) > j2 or abs(m3) > j3:
        return 0.0

    # Racah's formula, all quantities below are integers
    t1 = (j2 - m1 - j3) // 2
    t2 = (j1 + m2 - j3) // 2
    t3 = (j1 + j2 - j3) // 2
    t4 = (j1 - m1) // 2
    t5 = (j2 + m2) // 2
    total = Fraction(0)
    for t in range(max(0, t1, t2), min(t3, t4, t5) + 1):
        denom = _fact(t) * _fact(t - t1) * _fact(t - t2) * _fact(t3 - t) * _fact(t4 - t) * _fact(t5 - t)
        total += Fraction((-1) ** t, denom)

    radicand = _delta_sq(j1, j2, j3) * (
        _fact((j1 + m1) // 2) * _fact((j1 - m1) // 2)
        * _fact((j2 + m2) // 2) * _fact((j2 - m2) // 2)
        * _fact((j3 + m3) // 2) * _fact((j3 - m3) // 2)
    )
    phase = -1 if ((j1 - j2 - m3) // 2) % 2 else 1
    return _signed_sqrt(phase * total, radicand)


def wigner3j(j1: Real, j2: Real, j3: Real, m1: Real, m2: Real, m3: Real) -> float:
    """Wigner 3-j symbol ``(j1 j2 j3; m1 m2 m3)``.

    Arguments are ordinary numbers (int, float, or Fraction) that must be
    integers or half-integers. Returns 0 when the triangle condition fails,
    when the projections do not sum to zero, or when some ``|m| > j``.

    Raises
    ------
    ValueError
        If a momentum is negative or not a half-integer, or if ``j`` and ``m``
        of a column have mismatched integer/half-integer parity.
    """
    tj = [twice(j) for j in (j1, j2, j3)]
    tm = [twice(m) for m in (m1, m2, m3)]
    for j, m in zip(tj, tm):
        if j < 0:
            raise ValueError("angular momenta must be non-negative")
        if (j - m) % 2:
            raise ValueError("j and m must both be integer or both half-integer")
    return _wigner3j_twice(*tj, *tm)


@lru_cache(maxsize=65536)
def _wigner6j_twice(j1: int, j2: int, j3: int, j4: int, j5: int, j6: int) -> float:
    triads = ((j1, j2, j3), (j1, j5, j6), (j4, j2, j6), (j4, j5, j3))
    if not all(triangle(*t) for t in triads):
        return 0.0

    a = [sum(t) // 2 for t in triads]
    b = [(j1 + j2 + j4 + j5) // 2, (j2 + j3 + j5 + j6) // 2, (j3 + j1 + j6 + j4) // 2]
    total = Fraction(0)
    for t in range(max(a), min(b) + 1):
        denom = 1
        for ai in a:
            denom *= _fact(t - ai)
        for bi in b:
            denom *= _fact(bi - t)
        total += Fraction((-1) ** t * _fact(t + 1), denom)

    radicand = Fraction(1)
    for tri in triads:
        radicand *= _delta_sq(*tri)
    return _signed_sqrt(total, radicand)


def wigner6j(j1: Real, j2: Real, j3: Real, j4: Real, j5: Real, j6: Real) -> float:
    """Wigner 6-j symbol ``{j1 j2 j3; j4 j5 j6}``.

    Returns 0 when any of the four triads violates the triangle inequality.
    A triad whose momenta sum to a half-integer cannot couple at all and is
    rejected as malformed input.
    """
    tj = [twice(j) for j in (j1, j2, j3, j4, j5, j6)]
    if any(j < 0 for j in tj):
        raise ValueError("angular momenta must be non-negative")
    j1_, j2_, j3_, j4_, j5_, j6_ = tj
    for tri in ((j1_, j2_, j3_), (j1_, j5_, j6_), (j4_, j2_, j6_), (j4_, j5_, j3_)):
        if sum(tri) % 2:
            raise ValueError(f"triad {tuple(x / 2 for x in tri)} has a half-integer sum")
    return _wigner6j_twice(*tj)


def clebsch_gordan(j1: Real, m1: Real, j2: Real, m2: Real, j: Real, m: Real) -> float:
    """Clebsch-Gordan coefficient ``<j1 m1; j2 m2 | j m>`` (Condon-Shortley)."""
    phase_twice = twice(j1) - twice(j2) + twice(m)
    phase = -1.0 if (phase_twice // 2) % 2 else 1.0
    return phase * math.sqrt(twice(j) + 1) * wigner3j(j1, j2, j, m1, m2, -m)
