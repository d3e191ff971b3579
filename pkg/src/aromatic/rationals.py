"""Exact rationals: construction, parsing and ``"p/q"`` rendering.

Coefficients are plain ``int`` when integral and ``gmpy2.mpq`` otherwise.
``mpq`` compares and hashes equal to :class:`fractions.Fraction`, so callers
may mix the two freely.
"""
from fractions import Fraction
from numbers import Rational

from gmpy2 import mpq


def rational(num, den=1):
    """Exact ``num / den``, collapsed to ``int`` when integral."""
    value = mpq(num, den)
    return int(value) if value.denominator == 1 else value


def tidy(value):
    """Collapse an integral rational to ``int``."""
    if isinstance(value, int):
        return value
    return int(value) if value.denominator == 1 else mpq(value)


def to_fraction(value):
    """Coerce an int, rational, or ``"p/q"`` string to an exact rational.

    Floats are rejected: every coefficient in this package must be exact.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return value
    if isinstance(value, Rational):
        return tidy(mpq(value.numerator, value.denominator))
    if isinstance(value, str):
        text = value.strip()
        if not text or "." in text or "e" in text.lower():
            raise ValueError(f"rational must be written p/q, got {value!r}")
        try:
            frac = Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"malformed rational {value!r}") from exc
        return rational(frac.numerator, frac.denominator)
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def format_rational(value):
    num, den = int(value.numerator), int(value.denominator)
    if den == 1:
        return str(num)
    return f"{num}/{den}"
