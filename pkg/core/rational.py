"""Exact rational scalars and their canonical "p/q" string form."""

from fractions import Fraction
from typing import Union
import re

from config.errors import ParseError

RationalLike = Union[Fraction, int, str]

# Integers or p/q, optional sign; no decimals, no exponents
_RATIONAL_RE = re.compile(r'^\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$')


def parse_rational(text: RationalLike) -> Fraction:
    """Parse "p/q" or "p" exactly; floats and decimals are rejected."""
    if isinstance(text, bool):
        raise ParseError(what='rational', detail=repr(text))
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str):
        raise ParseError(what='rational', detail=f"{text!r} is not a string or integer")

    match = _RATIONAL_RE.match(text)
    if not match:
        raise ParseError(what='rational', detail=f"{text!r} is not of the form p/q")
    numerator = int(match.group(1))
    denominator = int(match.group(2)) if match.group(2) is not None else 1
    if denominator == 0:
        raise ParseError(what='rational', detail=f"{text!r} has a zero denominator")
    return Fraction(numerator, denominator)


def format_rational(value: Fraction) -> str:
    """Canonical string: reduced, positive denominator, always with "/q"."""
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def display(value: Fraction, precision: int = 6) -> float:
    """Float rendering for plots and log lines only."""
    return round(float(value), precision)

