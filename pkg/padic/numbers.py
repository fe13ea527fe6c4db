"""Finite-precision p-adic numbers.

A nonzero value is p^valuation * unit with the unit known modulo p^precision
(relative precision). A zero carries valuation inf and ``precision`` is then
the absolute precision: the value is only known to be 0 mod p^precision.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from errors import InputError, NonUnit


def valuation(n: Union[int, Fraction], p: int) -> Union[int, float]:
    """v_p of a nonzero rational; inf for zero."""
    if n == 0:
        return math.inf
    n = Fraction(n)
    v = 0
    num, den = n.numerator, n.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


@dataclass(frozen=True)
class PadicNumber:
    """p^valuation * unit, unit coprime to p and known mod p^precision."""

    p: int
    unit: int
    valuation: Union[int, float]
    precision: int

    def __post_init__(self):
        if self.precision < 0:
            raise InputError(f"negative p-adic precision {self.precision}")
        if self.valuation != math.inf and self.unit % self.p == 0:
            raise InputError(f"unit part {self.unit} is divisible by {self.p}")

    # ─── Construction ───────────────────────────────────────────────────────

    @classmethod
    def zero(cls, p: int, precision: int) -> "PadicNumber":
        return cls(p, 0, math.inf, max(precision, 0))

    @classmethod
    def from_rational(cls, x: Union[int, Fraction], p: int, precision: int) -> "PadicNumber":
        """x to relative precision ``precision``."""
        x = Fraction(x)
        if x == 0:
            return cls.zero(p, precision)
        v = valuation(x, p)
        scaled = x / Fraction(p) ** v
        modulus = p ** precision
        unit = scaled.numerator * pow(scaled.denominator, -1, modulus) % modulus
        return cls(p, unit, v, precision)

    @classmethod
    def from_residue(cls, n: int, p: int, absolute: int) -> "PadicNumber":
        """The integer n known modulo p^absolute."""
        return cls._normalize(p, n, 0, absolute)

    @classmethod
    def _normalize(cls, p: int, n: int, shift: int, absolute: int) -> "PadicNumber":
        """n * p^shift known modulo p^absolute."""
        if n == 0 or shift >= absolute:
            return cls.zero(p, absolute)
        while n % p == 0:
            n //= p
            shift += 1
            if shift >= absolute:
                return cls.zero(p, absolute)
        m = absolute - shift
        return cls(p, n % p ** m, shift, m)

    # ─── Queries ────────────────────────────────────────────────────────────

    def is_zero(self) -> bool:
        return self.valuation == math.inf

    def is_unit(self) -> bool:
        return self.valuation == 0

    @property
    def absolute_precision(self) -> int:
        if self.is_zero():
            return self.precision
        return self.valuation + self.precision

    def residue(self, n: int) -> int:
        """The integer in [0, p^n) congruent to self; needs valuation >= 0 and n <= absolute precision."""
        if n > self.absolute_precision:
            raise InputError(f"residue mod {self.p}^{n} exceeds the known precision {self.absolute_precision}")
        if self.is_zero():
            return 0
        if self.valuation < 0:
            raise NonUnit(f"{self} is not integral")
        return self.unit * self.p ** self.valuation % self.p ** n

    def to_fraction(self) -> Fraction:
        """The representative p^v * unit."""
        if self.is_zero():
            return Fraction(0)
        return Fraction(self.unit) * Fraction(self.p) ** self.valuation

    def congruent(self, other: Union["PadicNumber", int, Fraction], n: int) -> bool:
        """True when self - other has valuation >= n (at the known precision)."""
        diff = self - other
        if diff.is_zero():
            return diff.precision >= n
        return diff.valuation >= n

    def __str__(self) -> str:
        if self.is_zero():
            return f"O({self.p}^{self.precision})"
        return f"{self.p}^{self.valuation} * {self.unit} + O({self.p}^{self.absolute_precision})"

    # ─── Arithmetic ─────────────────────────────────────────────────────────

    def _coerce(self, other) -> "PadicNumber":
        if isinstance(other, PadicNumber):
            if other.p != self.p:
                raise InputError(f"cannot combine {self.p}-adic and {other.p}-adic numbers")
            return other
        if isinstance(other, (int, Fraction)):
            return PadicNumber.from_rational(other, self.p, max(self.absolute_precision, 1) + 1)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        absolute = min(self.absolute_precision, other.absolute_precision)
        if self.is_zero() and other.is_zero():
            return PadicNumber.zero(self.p, absolute)
        if self.is_zero() or other.is_zero():
            nonzero = other if self.is_zero() else self
            return PadicNumber._normalize(self.p, nonzero.unit, nonzero.valuation, absolute)
        v = min(self.valuation, other.valuation)
        n = self.unit * self.p ** (self.valuation - v) + other.unit * self.p ** (other.valuation - v)
        return PadicNumber._normalize(self.p, n, v, absolute)

    __radd__ = __add__

    def __neg__(self) -> "PadicNumber":
        if self.is_zero():
            return self
        modulus = self.p ** self.precision
        return PadicNumber(self.p, -self.unit % modulus, self.valuation, self.precision)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.is_zero() or other.is_zero():
            absolute = self.absolute_precision + other.absolute_precision
            if not self.is_zero():
                absolute = other.precision + self.valuation
            elif not other.is_zero():
                absolute = self.precision + other.valuation
            return PadicNumber.zero(self.p, absolute)
        m = min(self.precision, other.precision)
        return PadicNumber(self.p, self.unit * other.unit % self.p ** m, self.valuation + other.valuation, m)

    __rmul__ = __mul__

    def inverse(self) -> "PadicNumber":
        if self.is_zero():
            raise ZeroDivisionError("p-adic zero has no inverse")
        modulus = self.p ** self.precision
        return PadicNumber(self.p, pow(self.unit, -1, modulus), -self.valuation, self.precision)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, e: int) -> "PadicNumber":
        if e < 0:
            return self.inverse() ** (-e)
        if e == 0:
            return PadicNumber(self.p, 1, 0, self.precision if not self.is_zero() else max(self.precision, 1))
        if self.is_zero():
            return PadicNumber.zero(self.p, self.precision * e)
        modulus = self.p ** self.precision
        return PadicNumber(self.p, pow(self.unit, e, modulus), self.valuation * e, self.precision)

    def __eq__(self, other) -> bool:
        """Equality at the common precision."""
        try:
            other = self._coerce(other)
        except InputError:
            return False
        if other is NotImplemented:
            return NotImplemented
        diff = self - other
        return diff.is_zero()

    def __hash__(self) -> int:
        return hash((self.p, self.valuation, self.unit % self.p))
