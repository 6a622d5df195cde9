"""Exact rational helpers shared by every module."""

from __future__ import annotations

from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Iterable


def to_fraction(x) -> Fraction:
    """Parse ints, Fractions, "num/den" strings, decimal strings or floats exactly.

    Floats go through their shortest repr, so 0.3 becomes 3/10 rather than the
    binary approximation.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(repr(x))
    if isinstance(x, Decimal):
        return Fraction(x)
    if isinstance(x, str):
        s = x.strip()
        if not s:
            raise ValueError("empty rational literal")
        return Fraction(s)
    raise TypeError(f"cannot interpret {x!r} as a rational")


def parse_vector(text: str | Iterable) -> tuple[Fraction, ...]:
    if isinstance(text, str):
        parts = [t for t in text.replace(" ", "").split(",") if t]
    else:
        parts = list(text)
    return tuple(to_fraction(t) for t in parts)


def fmt(q: Fraction) -> str:
    q = to_fraction(q)
    return f"{q.numerator}/{q.denominator}"


def dec(q: Fraction, digits: int = 12) -> str:
    q = to_fraction(q)
    with localcontext() as ctx:
        ctx.prec = digits + 10
        val = Decimal(q.numerator) / Decimal(q.denominator)
        return format(val, f".{digits}g")


def pd(q: Fraction) -> int:
    """Denominator of q in lowest terms."""
    return to_fraction(q).denominator


def rational_record(q: Fraction, digits: int = 12) -> dict:
    return {"value": fmt(q), "decimal": dec(q, digits)}
