"""Exact binary rationals ``m * 2**e``."""

from __future__ import annotations

import decimal
import re
from fractions import Fraction
from typing import Union

from gmpy2 import mpz

__all__ = ["Dyadic", "DyadicLike"]

_DYADIC_RE = re.compile(r"^\s*([+-]?\d+)\s*\*\s*2\s*\^\s*([+-]?\d+)\s*$")


def _digits(m: int) -> str:
    # gmpy2 formatting is not subject to the int-to-str digit limit
    return mpz(m).digits()


def _trailing_zeros(m: int) -> int:
    return (m & -m).bit_length() - 1


class Dyadic:
    """Immutable dyadic number in canonical form (odd mantissa, or ``0*2^0``)."""

    __slots__ = ("mantissa", "exponent")

    mantissa: int
    exponent: int

    def __init__(self, mantissa: int = 0, exponent: int = 0):
        mantissa = int(mantissa)
        exponent = int(exponent)
        if mantissa == 0:
            exponent = 0
        else:
            tz = _trailing_zeros(mantissa)
            if tz:
                mantissa >>= tz
                exponent += tz
        object.__setattr__(self, "mantissa", mantissa)
        object.__setattr__(self, "exponent", exponent)

    def __setattr__(self, name, value):
        raise AttributeError("Dyadic is immutable")

    @classmethod
    def _canonical(cls, mantissa: int, exponent: int) -> "Dyadic":
        # caller guarantees canonical form
        d = object.__new__(cls)
        object.__setattr__(d, "mantissa", mantissa)
        object.__setattr__(d, "exponent", exponent)
        return d

    # construction -------------------------------------------------------

    @classmethod
    def coerce(cls, value: "DyadicLike") -> "Dyadic":
        if isinstance(value, Dyadic):
            return value
        if isinstance(value, int):
            return cls(value, 0)
        if isinstance(value, Fraction):
            return cls.from_fraction(value)
        if isinstance(value, str):
            return cls.parse(value)
        raise TypeError(f"cannot convert {type(value).__name__} to Dyadic")

    @classmethod
    def from_fraction(cls, q: Fraction) -> "Dyadic":
        den = q.denominator
        if den & (den - 1):
            raise ValueError(f"{q} is not a dyadic rational")
        return cls(q.numerator, -(den.bit_length() - 1))

    @classmethod
    def parse(cls, text: str) -> "Dyadic":
        """Parse ``"<mantissa>*2^<exponent>"``; a bare integer is also accepted."""
        match = _DYADIC_RE.match(text)
        if match:
            return cls(int(mpz(match.group(1))), int(match.group(2)))
        try:
            return cls(int(mpz(text.strip())), 0)
        except ValueError:
            raise ValueError(f"malformed dyadic literal: {text!r}") from None

    @classmethod
    def pow2(cls, e: int) -> "Dyadic":
        return cls(1, e)

    # conversion ---------------------------------------------------------

    def to_fraction(self) -> Fraction:
        if self.exponent >= 0:
            return Fraction(self.mantissa << self.exponent)
        return Fraction(self.mantissa, 1 << -self.exponent)

    def __float__(self) -> float:
        return float(self.to_fraction())

    def __str__(self) -> str:
        return f"{_digits(self.mantissa)}*2^{self.exponent}"

    def __repr__(self) -> str:
        return f"Dyadic({_digits(self.mantissa)}, {self.exponent})"

    def decimal(self, digits: int = 20) -> str:
        """Non-authoritative decimal rendering with ``digits`` significant digits."""
        if self.mantissa == 0:
            return "0"
        m, e = self.mantissa, self.exponent
        keep = 4 * digits + 64
        if abs(m).bit_length() > keep:
            drop = abs(m).bit_length() - keep
            m, e = m >> drop, e + drop
        with decimal.localcontext() as ctx:
            ctx.prec = digits
            ctx.Emax, ctx.Emin = decimal.MAX_EMAX, decimal.MIN_EMIN
            value = decimal.Decimal(m) * decimal.Decimal(2) ** e
            return str(+value)

    # predicates ---------------------------------------------------------

    def sign(self) -> int:
        return (self.mantissa > 0) - (self.mantissa < 0)

    def is_zero(self) -> bool:
        return self.mantissa == 0

    def log2_floor(self) -> int:
        """``floor(log2 |self|)``; undefined for zero."""
        if self.mantissa == 0:
            raise ValueError("log2 of zero")
        return abs(self.mantissa).bit_length() - 1 + self.exponent

    def bits(self) -> int:
        """Number of bits in the mantissa."""
        return abs(self.mantissa).bit_length()

    # arithmetic ---------------------------------------------------------

    def __neg__(self) -> "Dyadic":
        return Dyadic._canonical(-self.mantissa, self.exponent)

    def __pos__(self) -> "Dyadic":
        return self

    def __abs__(self) -> "Dyadic":
        return self if self.mantissa >= 0 else -self

    def __add__(self, other: "DyadicLike") -> "Dyadic":
        other = _maybe(other)
        if other is NotImplemented:
            return other
        if self.mantissa == 0:
            return other
        if other.mantissa == 0:
            return self
        e = min(self.exponent, other.exponent)
        return Dyadic((self.mantissa << (self.exponent - e))
                      + (other.mantissa << (other.exponent - e)), e)

    __radd__ = __add__

    def __sub__(self, other: "DyadicLike") -> "Dyadic":
        other = _maybe(other)
        if other is NotImplemented:
            return other
        if other.mantissa == 0:
            return self
        if self.mantissa == 0:
            return -other
        e = min(self.exponent, other.exponent)
        return Dyadic((self.mantissa << (self.exponent - e))
                      - (other.mantissa << (other.exponent - e)), e)

    def __rsub__(self, other: "DyadicLike") -> "Dyadic":
        other = _maybe(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other: "DyadicLike") -> "Dyadic":
        other = _maybe(other)
        if other is NotImplemented:
            return other
        return Dyadic(self.mantissa * other.mantissa, self.exponent + other.exponent)

    __rmul__ = __mul__

    def shift(self, s: int) -> "Dyadic":
        """Multiply by ``2**s`` exactly."""
        if self.mantissa == 0:
            return self
        return Dyadic._canonical(self.mantissa, self.exponent + s)

    def half(self) -> "Dyadic":
        return self.shift(-1)

    # comparison ---------------------------------------------------------

    def _cmp(self, other: "Dyadic") -> int:
        a, b = self.mantissa, other.mantissa
        sa, sb = (a > 0) - (a < 0), (b > 0) - (b < 0)
        if sa != sb or sa == 0:
            return (sa > sb) - (sa < sb)
        # same nonzero sign: compare magnitudes by binary length first
        la = abs(a).bit_length() + self.exponent
        lb = abs(b).bit_length() + other.exponent
        if la != lb:
            return sa if la > lb else -sa
        e = min(self.exponent, other.exponent)
        d = (a << (self.exponent - e)) - (b << (other.exponent - e))
        return (d > 0) - (d < 0)

    def __eq__(self, other) -> bool:
        if isinstance(other, Dyadic):
            return self.mantissa == other.mantissa and self.exponent == other.exponent
        if isinstance(other, int):
            return self == Dyadic(other)
        if isinstance(other, Fraction):
            return self.to_fraction() == other
        return NotImplemented

    def __lt__(self, other) -> bool:
        other = _maybe(other)
        if other is NotImplemented:
            return other
        return self._cmp(other) < 0

    def __le__(self, other) -> bool:
        other = _maybe(other)
        if other is NotImplemented:
            return other
        return self._cmp(other) <= 0

    def __gt__(self, other) -> bool:
        other = _maybe(other)
        if other is NotImplemented:
            return other
        return self._cmp(other) > 0

    def __ge__(self, other) -> bool:
        other = _maybe(other)
        if other is NotImplemented:
            return other
        return self._cmp(other) >= 0

    def __hash__(self) -> int:
        return hash((self.mantissa, self.exponent))

    def __reduce__(self):
        return (Dyadic, (self.mantissa, self.exponent))


DyadicLike = Union[Dyadic, int, Fraction, str]


def _maybe(value) -> Dyadic:
    if isinstance(value, Dyadic):
        return value
    if isinstance(value, int):
        return Dyadic(value)
    if isinstance(value, Fraction):
        return Dyadic.from_fraction(value)
    return NotImplemented
