"""Sparse integer polynomials and the derivative chain.

A polynomial is stored as its nonzero terms ``(exponent, coefficient)`` in
strictly increasing exponent order.  Everything here is exact.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import gmpy2

from .dyadic import Dyadic
from .errors import ChainError, ParseError, ZeroPolynomialError

__all__ = [
    "MAX_EXPONENT",
    "Magnitude",
    "SparsePolynomial",
    "parse",
    "parse_rational",
    "strip_power",
    "reflect",
    "clear_denominators",
    "next_in_chain",
    "derivative_chain",
    "cauchy_exponent",
    "sign_variations",
    "eval_exact",
]

MAX_EXPONENT = 2**62 - 1


@dataclass(frozen=True)
class Magnitude:
    """Degree ``n``, coefficient bits ``tau`` (all ``|a_i| < 2**tau``) and term count ``k``."""

    n: int
    tau: int
    k: int


class SparsePolynomial:
    """Immutable univariate integer polynomial in sparse form."""

    __slots__ = ("terms",)

    terms: tuple[tuple[int, int], ...]

    def __init__(self, terms: Iterable[tuple[int, int]] = ()):
        merged: dict[int, int] = {}
        for e, c in terms:
            e = int(e)
            if e < 0:
                raise ValueError(f"negative exponent {e}")
            if e > MAX_EXPONENT:
                raise ValueError(f"exponent {e} exceeds 2^62 - 1")
            merged[e] = merged.get(e, 0) + int(c)
        object.__setattr__(
            self, "terms", tuple(sorted((e, c) for e, c in merged.items() if c != 0)))

    def __setattr__(self, name, value):
        raise AttributeError("SparsePolynomial is immutable")

    @classmethod
    def _raw(cls, terms: tuple[tuple[int, int], ...]) -> "SparsePolynomial":
        # caller guarantees normal form
        self = object.__new__(cls)
        object.__setattr__(self, "terms", terms)
        return self

    @classmethod
    def from_dense(cls, coeffs: Sequence[int]) -> "SparsePolynomial":
        return cls(enumerate(coeffs))

    # basic properties ---------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self) -> int:
        return len(self.terms)

    @property
    def k(self) -> int:
        return len(self.terms)

    @property
    def degree(self) -> int:
        if not self.terms:
            raise ZeroPolynomialError("the zero polynomial has no degree")
        return self.terms[-1][0]

    @property
    def lead(self) -> int:
        return self.terms[-1][1]

    @property
    def low_exponent(self) -> int:
        return self.terms[0][0]

    def coeff_bits(self) -> int:
        """Smallest ``tau >= 1`` with every ``|a_i| < 2**tau``."""
        if not self.terms:
            return 1
        return max(1, max(abs(c) for _, c in self.terms).bit_length())

    def magnitude(self) -> Magnitude:
        n = self.terms[-1][0] if self.terms else 0
        return Magnitude(n=n, tau=self.coeff_bits(), k=len(self.terms))

    def coefficient(self, e: int) -> int:
        for ee, c in self.terms:
            if ee == e:
                return c
        return 0

    # algebra ------------------------------------------------------------

    def __neg__(self) -> "SparsePolynomial":
        return SparsePolynomial._raw(tuple((e, -c) for e, c in self.terms))

    def __add__(self, other: "SparsePolynomial") -> "SparsePolynomial":
        return SparsePolynomial(self.terms + other.terms)

    def __sub__(self, other: "SparsePolynomial") -> "SparsePolynomial":
        return self + (-other)

    def __mul__(self, other: "SparsePolynomial | int") -> "SparsePolynomial":
        if isinstance(other, int):
            return SparsePolynomial((e, c * other) for e, c in self.terms)
        return SparsePolynomial(
            (e1 + e2, c1 * c2) for e1, c1 in self.terms for e2, c2 in other.terms)

    __rmul__ = __mul__

    def shift(self, s: int) -> "SparsePolynomial":
        """Multiply by ``x**s`` (``s`` may be negative if it divides)."""
        if self.terms and self.terms[0][0] + s < 0:
            raise ValueError("x^s does not divide the polynomial")
        return SparsePolynomial._raw(tuple((e + s, c) for e, c in self.terms))

    def derivative(self) -> "SparsePolynomial":
        return SparsePolynomial._raw(tuple((e - 1, e * c) for e, c in self.terms if e))

    def __eq__(self, other) -> bool:
        if isinstance(other, SparsePolynomial):
            return self.terms == other.terms
        if isinstance(other, int):
            return self.terms == ((0, other),) if other else not self.terms
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.terms)

    def __call__(self, x) -> Dyadic:
        return eval_exact(self, Dyadic.coerce(x))

    # serialization ------------------------------------------------------

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        out = []
        for e, c in reversed(self.terms):
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if e == 0:
                body = str(a)
            else:
                var = "x" if e == 1 else f"x^{e}"
                body = var if a == 1 else f"{a}*{var}"
            out.append((sign, body))
        first_sign, first = out[0]
        text = ("-" if first_sign == "-" else "") + first
        for sign, body in out[1:]:
            text += f" {sign} {body}"
        return text

    def __repr__(self) -> str:
        return f"SparsePolynomial({list(self.terms)!r})"

    def to_json(self) -> dict:
        return {"terms": [[e, str(c)] for e, c in self.terms]}

    @classmethod
    def from_json(cls, data: "dict | str") -> "SparsePolynomial":
        if isinstance(data, str):
            data = json.loads(data)
        try:
            terms = data["terms"]
            return cls((int(e), int(c)) for e, c in terms)
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed polynomial JSON: {exc}") from None


# parsing ----------------------------------------------------------------

class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self._skip()

    def _skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self, ch: str) -> bool:
        if self.peek() == ch:
            self.pos += 1
            self._skip()
            return True
        return False

    def expect(self, ch: str):
        if not self.take(ch):
            found = self.peek() or "end of input"
            raise ParseError(f"expected {ch!r}, found {found!r}", self.pos)

    def uint(self) -> int:
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if start == self.pos:
            found = self.peek() or "end of input"
            raise ParseError(f"expected digits, found {found!r}", start)
        value = int(self.text[start:self.pos])
        self._skip()
        return value


def _parse_terms(text: str, allow_rational: bool) -> list[tuple[int, Fraction]]:
    sc = _Scanner(text)
    if not sc.peek():
        raise ParseError("empty expression", 0)
    terms: list[tuple[int, Fraction]] = []
    sign = 1
    if sc.take("-"):
        sign = -1
    else:
        sc.take("+")
    while True:
        coeff = Fraction(1)
        exponent = 0
        if sc.peek().isdigit():
            coeff = Fraction(sc.uint())
            if sc.peek() == "/":
                slash = sc.pos
                if not allow_rational:
                    raise ParseError("rational coefficients need clear_denominators", slash)
                sc.take("/")
                den = sc.uint()
                if den == 0:
                    raise ParseError("zero denominator", slash)
                coeff /= den
            has_star = sc.take("*")
            if sc.peek() == "x":
                exponent = _parse_var(sc)
            elif has_star:
                raise ParseError("expected 'x' after '*'", sc.pos)
        elif sc.peek() == "x":
            exponent = _parse_var(sc)
        else:
            found = sc.peek() or "end of input"
            raise ParseError(f"expected a term, found {found!r}", sc.pos)
        terms.append((exponent, sign * coeff))
        if sc.take("+"):
            sign = 1
        elif sc.take("-"):
            sign = -1
        elif not sc.peek():
            return terms
        else:
            raise ParseError(f"unexpected {sc.peek()!r}", sc.pos)


def _parse_var(sc: _Scanner) -> int:
    sc.expect("x")
    if not sc.take("^"):
        return 1
    at = sc.pos
    e = sc.uint()
    if e > MAX_EXPONENT:
        raise ParseError("exponent exceeds 2^62 - 1", at)
    return e


def parse(text: str) -> SparsePolynomial:
    """Parse an integer term expression such as ``"x^50 - 4*x^48 + 4"``.

    Repeated exponents are summed, so ``"x + x - 2*x"`` is the zero polynomial.
    """
    return SparsePolynomial((e, int(c)) for e, c in _parse_terms(text, False))


def parse_rational(text: str) -> list[tuple[int, Fraction]]:
    """Parse an expression that may contain ``p/q`` coefficients."""
    merged: dict[int, Fraction] = {}
    for e, c in _parse_terms(text, True):
        merged[e] = merged.get(e, Fraction(0)) + c
    return sorted((e, c) for e, c in merged.items() if c)


# chain machinery --------------------------------------------------------

def strip_power(p: SparsePolynomial) -> tuple[SparsePolynomial, int]:
    """Split ``p = x**i0 * q`` with ``q(0) != 0``."""
    if p.is_zero():
        raise ZeroPolynomialError("strip_power of the zero polynomial")
    i0 = p.terms[0][0]
    return p.shift(-i0), i0


def reflect(p: SparsePolynomial) -> SparsePolynomial:
    """Return ``p(-x)``."""
    return SparsePolynomial._raw(tuple((e, -c if e & 1 else c) for e, c in p.terms))


def clear_denominators(terms: Iterable[tuple[int, "Fraction | int"]]) -> SparsePolynomial:
    """Multiply a rational k-nomial by the product of its coefficient denominators."""
    terms = [(int(e), Fraction(c)) for e, c in terms]
    scale = 1
    for _, c in terms:
        if c.denominator == 0:
            raise ZeroDivisionError("zero denominator")
        scale *= c.denominator
    return SparsePolynomial((e, int(c * scale)) for e, c in terms)


def next_in_chain(q: SparsePolynomial) -> SparsePolynomial:
    """``x**(1-g) * q'`` where ``g`` is the smallest positive exponent of ``q``.

    The result again has a nonzero constant term and one term fewer.
    """
    if len(q.terms) < 2:
        raise ChainError("no chain step from a constant polynomial")
    if q.terms[0][0] != 0:
        raise ChainError("chain polynomial must have a nonzero constant term")
    g = q.terms[1][0]
    return SparsePolynomial._raw(tuple((e - g, e * c) for e, c in q.terms[1:]))


def derivative_chain(q: SparsePolynomial) -> list[SparsePolynomial]:
    chain = [q]
    while len(chain[-1].terms) > 1:
        chain.append(next_in_chain(chain[-1]))
    if chain[-1].is_zero() or chain[-1].terms[0][0] != 0:
        raise ChainError("chain polynomial must have a nonzero constant term")
    return chain


def cauchy_exponent(p: SparsePolynomial) -> int:
    """``e`` such that every complex root of ``p`` has modulus below ``2**e``.

    With ``t >= 1`` minimal such that every ``|a_i| <= 2**t`` the Cauchy bound
    gives ``|z| < 1 + 2**t <= 2**(t+1)``.
    """
    if p.is_zero():
        raise ZeroPolynomialError("cauchy_exponent of the zero polynomial")
    biggest = max(abs(c) for _, c in p.terms)
    return max(1, (biggest - 1).bit_length()) + 1


def sign_variations(p: SparsePolynomial) -> int:
    count = 0
    prev = 0
    for _, c in p.terms:
        s = 1 if c > 0 else -1
        if prev and s != prev:
            count += 1
        prev = s
    return count


def eval_exact(p: SparsePolynomial, x: Dyadic) -> Dyadic:
    """Exact ``p(x)``; powers by repeated squaring on the mantissa."""
    if not p.terms:
        return Dyadic(0)
    m, e = gmpy2.mpz(x.mantissa), x.exponent
    if m == 0:
        return Dyadic(p.terms[0][1] if p.terms[0][0] == 0 else 0)
    # value = sum a_i m^i 2^(e i); align everything at the smallest power of two
    base = min(e * p.terms[0][0], e * p.terms[-1][0])
    total = gmpy2.mpz(0)
    pw = _PowerLadder(m)
    for i, a in p.terms:
        total += (a * pw.power(i)) << (e * i - base)
    return Dyadic(int(total), base)


class _PowerLadder:
    """Binary powering that shares the squarings ``m, m^2, m^4, ...`` across terms."""

    def __init__(self, m):
        self.squares = [m]

    def power(self, i: int):
        result = gmpy2.mpz(1)
        j = 0
        while i:
            if j == len(self.squares):
                last = self.squares[-1]
                self.squares.append(last * last)
            if i & 1:
                result *= self.squares[j]
            i >>= 1
            j += 1
        return result
