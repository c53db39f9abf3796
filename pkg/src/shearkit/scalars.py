"""Coefficient arithmetic in two regimes: exact Gaussian rationals and complex doubles.

Every polynomial in this package carries coefficients from exactly one
regime.  The exact regime stores real and imaginary parts as
`fractions.Fraction` values (automatically reduced, positive denominator,
arbitrary precision), so all identity checks run with zero tolerance.
The approximate regime stores both parts as floats and exists for the
numeric dynamics pipeline only.  Mixing the two regimes in one operation
raises `RegimeMismatch`.
"""

from __future__ import annotations

from enum import Enum
from fractions import Fraction

from .errors import RegimeMismatch

__all__ = ["Regime", "Scalar", "ZERO", "ONE", "I"]


class Regime(Enum):
    EXACT = "exact"
    APPROX = "approx"


_RATIONAL = (int, Fraction)


class Scalar:
    """A complex scalar tagged, by construction, with its coefficient regime.

    Instances are immutable by convention; no method mutates `re` or `im`.
    """

    __slots__ = ("re", "im")

    def __init__(self, re, im=0):
        re_rat = isinstance(re, _RATIONAL) and not isinstance(re, bool)
        im_rat = isinstance(im, _RATIONAL) and not isinstance(im, bool)
        if re_rat and im_rat:
            self.re = Fraction(re)
            self.im = Fraction(im)
        elif isinstance(re, float) and (im_rat or isinstance(im, float)):
            self.re = float(re)
            self.im = float(im)
        elif re_rat and isinstance(im, float):
            raise RegimeMismatch("cannot mix a rational part with a float part")
        else:
            raise TypeError(f"unsupported scalar parts {re!r}, {im!r}")

    @classmethod
    def exact(cls, re=0, im=0) -> "Scalar":
        if not isinstance(re, _RATIONAL) or not isinstance(im, _RATIONAL):
            raise RegimeMismatch("exact scalars take int or Fraction parts")
        return cls(Fraction(re), Fraction(im))

    @classmethod
    def approx(cls, value) -> "Scalar":
        z = complex(value)
        return cls(z.real, z.imag)

    @property
    def regime(self) -> Regime:
        return Regime.EXACT if isinstance(self.re, Fraction) else Regime.APPROX

    def _lift(self, other) -> "Scalar":
        if isinstance(other, Scalar):
            if other.regime is not self.regime:
                raise RegimeMismatch(
                    f"cannot combine {self.regime.value} and {other.regime.value} scalars"
                )
            return other
        if isinstance(other, int):
            if self.regime is Regime.EXACT:
                return Scalar.exact(other)
            return Scalar.approx(other)
        if isinstance(other, Fraction):
            if self.regime is Regime.EXACT:
                return Scalar.exact(other)
            raise RegimeMismatch("Fraction operand requires the exact regime")
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return Scalar(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return Scalar(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return Scalar(other.re - self.re, other.im - self.im)

    def __neg__(self):
        return Scalar(-self.re, -self.im)

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return Scalar(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        norm = other.re * other.re + other.im * other.im
        if norm == 0:
            raise ZeroDivisionError("scalar division by zero")
        return Scalar(
            (self.re * other.re + self.im * other.im) / norm,
            (self.im * other.re - self.re * other.im) / norm,
        )

    def __rtruediv__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return other / self

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0:
            base = self.one_like() / self
            exponent = -exponent
        else:
            base = self
        out = self.one_like()
        for _ in range(exponent):
            out = out * base
        return out

    def conjugate(self) -> "Scalar":
        return Scalar(self.re, -self.im)

    def one_like(self) -> "Scalar":
        if self.regime is Regime.EXACT:
            return Scalar.exact(1)
        return Scalar.approx(1.0)

    def zero_like(self) -> "Scalar":
        if self.regime is Regime.EXACT:
            return Scalar.exact(0)
        return Scalar.approx(0.0)

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def is_one(self) -> bool:
        return self.re == 1 and self.im == 0

    def __bool__(self) -> bool:
        return not self.is_zero()

    def to_complex(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Scalar):
            return NotImplemented
        return (
            self.regime is other.regime
            and self.re == other.re
            and self.im == other.im
        )

    def __hash__(self):
        return hash((self.regime, self.re, self.im))

    def __repr__(self) -> str:
        return f"Scalar({self.re!r}, {self.im!r})"


ZERO = Scalar.exact(0)
ONE = Scalar.exact(1)
I = Scalar.exact(0, 1)
