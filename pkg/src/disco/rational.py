"""Strict rational literals: ``int`` or ``int/positive-int``. No floats."""

from __future__ import annotations

import re
from fractions import Fraction
from numbers import Rational

_RAT = re.compile(r"\s*(-?\d+)\s*(?:/\s*(\d+))?\s*$")


def parse_rational(text: str) -> Fraction:
    m = _RAT.match(text)
    if m is None:
        raise ValueError(f"not a rational literal: {text!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ValueError(f"zero denominator in {text!r}")
    return Fraction(num, den)


def as_rational(value) -> Fraction:
    """Coerce ints, Fractions and literal strings; floats are refused."""
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, Rational):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


def fmt(q: Fraction) -> str:
    return str(Fraction(q))
