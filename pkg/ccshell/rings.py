"""Coefficient rings: the integers, the rationals and prime fields.

Scalars are plain Python objects: ``int`` over ℤ, :class:`fractions.Fraction`
over ℚ, and canonical residues ``0 <= x < p`` over ℤ/p.  Every arithmetic
result passes through :meth:`RingSpec.normalize`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Optional, Tuple

import numpy as np
from sympy import isprime

from ccshell.errors import InvalidRing, InvalidScalar

Scalar = Any

INTEGERS = "Z"
RATIONALS = "Q"
PRIME_FIELD = "Fp"


@dataclass(frozen=True)
class RingSpec:
    kind: str
    p: Optional[int] = None

    def __post_init__(self) -> None:
        if self.kind not in (INTEGERS, RATIONALS, PRIME_FIELD):
            raise InvalidRing(f"unknown ring kind {self.kind!r}")
        if self.kind == PRIME_FIELD:
            if self.p is None or not isprime(self.p):
                raise InvalidRing(f"Fp needs a prime modulus, got {self.p!r}")
        elif self.p is not None:
            raise InvalidRing(f"ring {self.kind} takes no modulus")

    # -- construction / display ------------------------------------------------

    @classmethod
    def parse(cls, tag: str) -> "RingSpec":
        """Parse ``"Z"``, ``"Q"`` or ``"Fp:<p>"``."""
        tag = tag.strip()
        if tag in (INTEGERS, RATIONALS):
            return cls(tag)
        head, sep, tail = tag.partition(":")
        if head == PRIME_FIELD and sep:
            try:
                return cls(PRIME_FIELD, int(tail))
            except ValueError:
                pass
        raise InvalidRing(f"cannot parse ring tag {tag!r}")

    def __str__(self) -> str:
        return f"Fp:{self.p}" if self.kind == PRIME_FIELD else self.kind

    @property
    def symbol(self) -> str:
        """Short symbol used when printing modules (``Z``, ``Q``, ``F5``)."""
        return f"F{self.p}" if self.kind == PRIME_FIELD else self.kind

    @property
    def is_field(self) -> bool:
        return self.kind != INTEGERS

    # -- scalars ---------------------------------------------------------------

    @property
    def zero(self) -> Scalar:
        return Fraction(0) if self.kind == RATIONALS else 0

    @property
    def one(self) -> Scalar:
        return Fraction(1) if self.kind == RATIONALS else 1

    def normalize(self, value: Scalar) -> Scalar:
        """Coerce *value* into its canonical representative.

        Raises :class:`InvalidScalar` for values that are not elements of the
        ring (a non-integral fraction over ℤ, a string, a float).
        """
        if isinstance(value, (bool, np.bool_)) or isinstance(value, float):
            raise InvalidScalar(f"{value!r} is not an exact ring scalar")
        if isinstance(value, np.integer):
            value = int(value)
        if self.kind == INTEGERS:
            if isinstance(value, Fraction):
                if value.denominator != 1:
                    raise InvalidScalar(f"{value} is not an integer")
                return int(value.numerator)
            if isinstance(value, int):
                return value
        elif self.kind == RATIONALS:
            if isinstance(value, (int, Fraction)):
                return Fraction(value)
        else:
            if isinstance(value, Fraction):
                if value.denominator % self.p == 0:
                    raise InvalidScalar(f"{value} has no image in Fp:{self.p}")
                return value.numerator * pow(value.denominator, -1, self.p) % self.p
            if isinstance(value, int):
                return value % self.p
        raise InvalidScalar(f"{value!r} is not a scalar of {self}")

    def is_zero(self, value: Scalar) -> bool:
        return self.normalize(value) == 0

    def is_unit(self, value: Scalar) -> bool:
        value = self.normalize(value)
        if self.kind == INTEGERS:
            return value in (1, -1)
        return value != 0

    def add(self, a: Scalar, b: Scalar) -> Scalar:
        return self.normalize(a + b)

    def sub(self, a: Scalar, b: Scalar) -> Scalar:
        return self.normalize(a - b)

    def mul(self, a: Scalar, b: Scalar) -> Scalar:
        return self.normalize(a * b)

    def neg(self, a: Scalar) -> Scalar:
        return self.normalize(-a)

    def inverse(self, a: Scalar) -> Scalar:
        a = self.normalize(a)
        if not self.is_unit(a):
            raise InvalidScalar(f"{a} is not a unit of {self}")
        if self.kind == INTEGERS:
            return a
        if self.kind == RATIONALS:
            return 1 / a
        return pow(a, -1, self.p)

    def quo_rem(self, a: Scalar, b: Scalar) -> Tuple[Scalar, Scalar]:
        """Euclidean division ``a = q*b + r``.

        Over ℤ the remainder is the one of smallest absolute value, so the
        pivot size strictly drops.  Over a field the division is exact.
        """
        if self.kind == INTEGERS:
            q, r = divmod(a, b)
            if 2 * abs(r) > abs(b):
                q += 1
                r -= b
            return q, r
        return self.mul(a, self.inverse(b)), self.zero

    def size(self, value: Scalar) -> int:
        """Euclidean size: ``|value|`` over ℤ, 1 for nonzero field elements."""
        value = self.normalize(value)
        if value == 0:
            return 0
        return abs(value) if self.kind == INTEGERS else 1

    def canonical_associate(self, value: Scalar) -> Tuple[Scalar, Scalar]:
        """Return ``(unit, associate)`` with ``unit * value == associate``.

        The associate is ``|value|`` over ℤ and 1 over a field (0 stays 0).
        """
        value = self.normalize(value)
        if value == 0:
            return self.one, self.zero
        if self.kind == INTEGERS:
            return (1, value) if value > 0 else (-1, -value)
        return self.inverse(value), self.one

    def reduce_array(self, array: np.ndarray) -> np.ndarray:
        """Reduce an object-dtype array in place over ℤ/p (no-op otherwise)."""
        if self.kind == PRIME_FIELD:
            array %= self.p
        return array


ZZ = RingSpec(INTEGERS)
QQ = RingSpec(RATIONALS)


def prime_field(p: int) -> RingSpec:
    return RingSpec(PRIME_FIELD, p)
