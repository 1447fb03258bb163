"""Exact rational arithmetic backend.

Every quantity in this package (shares, money, bids, prices, probabilities,
utilities) is an exact rational in canonical reduced form: positive
denominator, gcd(|numerator|, denominator) = 1. gmpy2's ``mpq`` is used when
available (roughly an order of magnitude faster than the stdlib), falling
back to ``fractions.Fraction``. Both satisfy ``numbers.Rational``, hash and
compare interchangeably, and print as ``p/q``.

Floats are rejected everywhere: a binary float would smuggle rounding into
arithmetic that the rest of the package treats as exact.
"""

from __future__ import annotations

import numbers
from decimal import Decimal, localcontext
from fractions import Fraction

try:
    from gmpy2 import mpq as Rational

    BACKEND = "gmpy2"
except ImportError:  # pragma: no cover - exercised only without gmpy2
    Rational = Fraction

    BACKEND = "fractions"

ZERO = Rational(0)
ONE = Rational(1)


def rational(value) -> Rational:
    """Coerce ``value`` to an exact rational.

    Accepts ints, rationals (Fraction/mpq), and strings in fraction
    ("3/10"), integer ("5"), or decimal ("0.3", "2.5e-3") notation; decimal
    text converts exactly via powers of ten. Floats raise TypeError.
    """
    if isinstance(value, float):
        raise TypeError(
            f"refusing float {value!r}: floats are inexact, pass a string or rational"
        )
    if isinstance(value, numbers.Rational):
        return Rational(value.numerator, value.denominator)
    if isinstance(value, str):
        try:
            parsed = Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational literal: {value!r}") from exc
        return Rational(parsed.numerator, parsed.denominator)
    raise TypeError(f"cannot interpret {type(value).__name__} as a rational")


def rational_str(value) -> str:
    """Canonical lossless text form: "p/q", or "p" when q = 1."""
    return str(value)


def decimal_approx(value, digits: int = 20) -> str:
    """Decimal approximation to ``digits`` significant digits.

    For human eyes only; the "p/q" form is the value of record.
    """
    with localcontext() as ctx:
        ctx.prec = digits
        return str(Decimal(int(value.numerator)) / Decimal(int(value.denominator)))
