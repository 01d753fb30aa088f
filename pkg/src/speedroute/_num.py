"""Exact rational helpers shared by all document formats."""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational

INF = float("inf")


def to_rational(value) -> Fraction:
    """Parse an int, decimal string, ``"p/q"`` string or float into a Fraction.

    Floats go through their shortest repr so ``0.1`` becomes exactly 1/10.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(value, Rational):
        return Fraction(value)
    if isinstance(value, float):
        if value != value or value in (INF, -INF):
            raise ValueError(f"not a finite number: {value!r}")
        return Fraction(repr(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"expected a number, got {type(value).__name__}")


def fmt_rational(value: Fraction) -> str:
    """Render a Fraction as a terminating decimal when possible, else ``p/q``."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    den = value.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return f"{value.numerator}/{value.denominator}"
    digits = max(twos, fives)
    scaled = value * 10**digits
    sign = "-" if scaled < 0 else ""
    whole, frac = divmod(abs(scaled.numerator), 10**digits)
    return f"{sign}{whole}.{frac:0{digits}d}"
