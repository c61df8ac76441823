"""Exact rational scalars.

Everything in this package computes over Q.  gmpy2.mpq is used when available
(it is an order of magnitude faster than fractions.Fraction), with a silent
fallback to the stdlib.  Both backends print integers as "p" and non-integers
as "p/q", and both accept those strings back, which is what the serializers
rely on.
"""

from __future__ import annotations

from dataclasses import dataclass

try:
    from gmpy2 import mpq as _Q

    BACKEND = "gmpy2"
except ImportError:  # pragma: no cover - exercised only without gmpy2
    from fractions import Fraction as _Q

    BACKEND = "fractions"

#: Constructor for exact rationals: Q(3), Q(3, 4), Q("3/4"), Q(other rational).
Q = _Q

ZERO = Q(0)
ONE = Q(1)


def rat(value, den=None):
    """Coerce ints, strings like '3/2', Fractions or backend rationals to Q.

    Floats are rejected: the engine is exact and a float almost always means
    an upstream mistake.
    """
    if isinstance(value, float):
        raise TypeError("floats are not exact; pass ints, strings or rationals")
    if den is not None:
        return Q(value) / Q(den)
    return Q(value)


def rat_str(q) -> str:
    return str(q)


@dataclass(frozen=True)
class QC:
    """Complex number with exact rational real and imaginary parts."""

    re: object
    im: object

    @staticmethod
    def of(re, im=0) -> "QC":
        return QC(Q(re), Q(im))

    def __add__(self, other: "QC") -> "QC":
        return QC(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "QC") -> "QC":
        return QC(self.re - other.re, self.im - other.im)

    def __mul__(self, other: "QC") -> "QC":
        return QC(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    def __neg__(self) -> "QC":
        return QC(-self.re, -self.im)

    def conj(self) -> "QC":
        return QC(self.re, -self.im)

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def abs2(self):
        return self.re * self.re + self.im * self.im

    def __str__(self) -> str:
        return f"{self.re}{'+' if self.im >= 0 else ''}{self.im}i"
