"""Exact dyadic rationals ``numerator / 2**exponent``."""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering

from .errors import SchemaError

_TEXT = re.compile(r"^\s*(-?\d+)\s*/\s*2\^(\d+)\s*$")


@total_ordering
@dataclass(frozen=True, init=False)
class Dyadic:
    """Canonical form: odd numerator, or numerator and exponent both zero."""

    numerator: int
    exponent: int

    def __init__(self, numerator: int = 0, exponent: int = 0):
        if not isinstance(numerator, int) or not isinstance(exponent, int):
            raise TypeError("Dyadic takes integer numerator and exponent")
        if exponent < 0:
            numerator, exponent = numerator << -exponent, 0
        if numerator == 0:
            exponent = 0
        else:
            while exponent and not numerator & 1:
                numerator >>= 1
                exponent -= 1
        object.__setattr__(self, "numerator", numerator)
        object.__setattr__(self, "exponent", exponent)

    @classmethod
    def coerce(cls, value) -> "Dyadic":
        if isinstance(value, Dyadic):
            return value
        if isinstance(value, bool):
            raise TypeError("booleans are not measures")
        if isinstance(value, int):
            return cls(value, 0)
        if isinstance(value, Fraction):
            den = value.denominator
            if den & (den - 1):
                raise ValueError(f"{value} is not dyadic")
            return cls(value.numerator, den.bit_length() - 1)
        raise TypeError(f"cannot make a Dyadic from {type(value).__name__}")

    @classmethod
    def pow2(cls, k: int) -> "Dyadic":
        """``2**k`` for any integer ``k``."""
        return cls(1, -k)

    def _align(self, other: "Dyadic"):
        e = max(self.exponent, other.exponent)
        return self.numerator << (e - self.exponent), other.numerator << (e - other.exponent), e

    def __add__(self, other):
        try:
            other = Dyadic.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        a, b, e = self._align(other)
        return Dyadic(a + b, e)

    __radd__ = __add__

    def __neg__(self):
        return Dyadic(-self.numerator, self.exponent)

    def __sub__(self, other):
        try:
            other = Dyadic.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            other = Dyadic.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return Dyadic(self.numerator * other.numerator, self.exponent + other.exponent)

    __rmul__ = __mul__

    def scale(self, k: int) -> "Dyadic":
        """``self * 2**k``."""
        return Dyadic(self.numerator, self.exponent - k)

    def half(self) -> "Dyadic":
        return self.scale(-1)

    def __eq__(self, other):
        if isinstance(other, Dyadic):
            return (self.numerator, self.exponent) == (other.numerator, other.exponent)
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.to_fraction() == other
        return NotImplemented

    def __hash__(self):
        return hash(self.to_fraction())

    def __lt__(self, other):
        if isinstance(other, Dyadic):
            a, b, _ = self._align(other)
            return a < b
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.to_fraction() < other
        return NotImplemented

    def __bool__(self) -> bool:
        return self.numerator != 0

    def to_fraction(self) -> Fraction:
        return Fraction(self.numerator, 1 << self.exponent)

    def __str__(self) -> str:
        return f"{self.numerator}/2^{self.exponent}"

    def __repr__(self) -> str:
        return f"Dyadic({self.numerator}, {self.exponent})"

    def to_json(self) -> str:
        return str(self)

    @classmethod
    def parse(cls, text: str) -> "Dyadic":
        m = _TEXT.match(text) if isinstance(text, str) else None
        if not m:
            raise SchemaError(f"expected 'p/2^e', got {text!r}")
        return cls(int(m.group(1)), int(m.group(2)))


ZERO = Dyadic(0)
ONE = Dyadic(1)
