"""Dense exact ground truth for small instances.

Everything here works on dense integer coefficient lists (ascending order)
with its own evaluation code, so a bug in the sparse machinery cannot hide
itself.  gcds use primitive pseudo-remainder sequences over the integers;
square-free parts come from Yun's algorithm; real roots are counted with
Sturm sequences evaluated exactly at rational points.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterable, Optional, Sequence

from gmpy2 import mpz

from .errors import DensifyError

__all__ = [
    "DEFAULT_CAP",
    "DensePolynomial",
    "densify",
    "square_free_decomposition",
    "sturm_sequence",
    "count_roots",
    "sturm_isolate",
    "VerifyReport",
    "verify_isolation",
]

DEFAULT_CAP = 4096


# integer polynomial helpers, coefficient lists in ascending order ---------

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _content(a: Sequence[int]) -> int:
    g = 0
    for c in a:
        g = gcd(g, c)
    return g


def _primitive(a: list[int]) -> list[int]:
    """Divide out the content and make the leading coefficient positive."""
    if not a:
        return a
    g = _content(a)
    if a[-1] < 0:
        g = -g
    return [c // g for c in a]


def _deriv(a: Sequence[int]) -> list[int]:
    return [i * a[i] for i in range(1, len(a))]


def _sub(a: Sequence[int], b: Sequence[int]) -> list[int]:
    n = max(len(a), len(b))
    out = [(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)]
    return _trim(out)


def _prem(a: Sequence[int], b: Sequence[int]) -> tuple[list[int], int]:
    """Pseudo-remainder ``lc(b)**delta * a mod b`` and the exponent ``delta``."""
    r = list(a)
    db = len(b) - 1
    lb = b[-1]
    delta = len(a) - len(b) + 1
    steps = 0
    while len(r) - 1 >= db and r:
        shift = len(r) - 1 - db
        lr = r[-1]
        r = [c * lb for c in r]
        for i, c in enumerate(b):
            r[i + shift] -= lr * c
        _trim(r)
        steps += 1
    # pad so the multiplier is exactly lc(b)**delta
    if steps < delta:
        r = [c * lb ** (delta - steps) for c in r]
    return r, delta


def _divexact(a: Sequence[int], b: Sequence[int]) -> list[int]:
    """Quotient ``a / b`` when it has integer coefficients (``b`` primitive, ``b | a``)."""
    r = list(a)
    db = len(b) - 1
    q = [0] * max(0, len(a) - db)
    while r and len(r) - 1 >= db:
        shift = len(r) - 1 - db
        c, rem = divmod(r[-1], b[-1])
        if rem:
            raise ArithmeticError("inexact polynomial division")
        q[shift] = c
        for i, bc in enumerate(b):
            r[i + shift] -= c * bc
        _trim(r)
    if r:
        raise ArithmeticError("polynomial division left a remainder")
    return _trim(q)


def _gcd(a: Sequence[int], b: Sequence[int]) -> list[int]:
    a, b = _primitive(_trim(list(a))), _primitive(_trim(list(b)))
    while b:
        r, _ = _prem(a, b)
        a, b = b, _primitive(r)
    return a


def _sign_at(a: Sequence[int], x: Fraction) -> int:
    """Sign of ``a(x)`` from ``sum a_i u^i v^(d-i)`` with ``x = u/v``, ``v > 0``."""
    if not a:
        return 0
    u, v = mpz(x.numerator), mpz(x.denominator)
    d = len(a) - 1
    nonzero = [i for i, c in enumerate(a) if c]
    if 8 * len(nonzero) < len(a):
        # mostly zero coefficients: sum the few terms directly
        acc = sum(a[i] * u**i * v ** (d - i) for i in nonzero)
    else:
        acc = mpz(a[-1])
        vp = mpz(1)
        for c in reversed(a[:-1]):
            vp *= v
            acc = acc * u + c * vp
    return (acc > 0) - (acc < 0)


def _cauchy_pow2(a: Sequence[int]) -> Fraction:
    """A power of two strictly above every root modulus of ``a``."""
    lead = abs(a[-1])
    ratio = Fraction(max(abs(c) for c in a[:-1]), lead) if len(a) > 1 else Fraction(0)
    bound = 1 + ratio
    e = 0
    while Fraction(2) ** e <= bound:
        e += 1
    return Fraction(2) ** e


# public types --------------------------------------------------------------

@dataclass(frozen=True)
class DensePolynomial:
    """Rational coefficients indexed by exponent; no trailing zeros."""

    coefficients: tuple[Fraction, ...]

    def __post_init__(self):
        coeffs = [Fraction(c) for c in self.coefficients]
        _trim(coeffs)
        object.__setattr__(self, "coefficients", tuple(coeffs))

    @classmethod
    def from_ints(cls, coeffs: Iterable[int]) -> "DensePolynomial":
        return cls(tuple(Fraction(c) for c in coeffs))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def is_zero(self) -> bool:
        return not self.coefficients

    def __call__(self, x) -> Fraction:
        x = Fraction(x)
        acc = Fraction(0)
        for c in reversed(self.coefficients):
            acc = acc * x + c
        return acc

    def integer_primitive(self) -> list[int]:
        """Primitive integer coefficient list with positive leading coefficient."""
        den = 1
        for c in self.coefficients:
            den = den * c.denominator // gcd(den, c.denominator)
        return _primitive([int(c * den) for c in self.coefficients])

    def monic(self) -> "DensePolynomial":
        lead = self.coefficients[-1]
        return DensePolynomial(tuple(c / lead for c in self.coefficients))

    def __mul__(self, other: "DensePolynomial") -> "DensePolynomial":
        a, b = self.coefficients, other.coefficients
        if not a or not b:
            return DensePolynomial(())
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            for j, y in enumerate(b):
                out[i + j] += x * y
        return DensePolynomial(tuple(out))

    def __pow__(self, e: int) -> "DensePolynomial":
        out = DensePolynomial((Fraction(1),))
        for _ in range(e):
            out = out * self
        return out


def densify(p, cap: int = DEFAULT_CAP) -> DensePolynomial:
    """Dense coefficient list of a sparse polynomial (anything with ``.terms``)."""
    terms = list(p.terms)
    if not terms:
        return DensePolynomial(())
    degree = max(e for e, _ in terms)
    if degree > cap:
        raise DensifyError(f"degree {degree} exceeds the densification cap {cap}")
    coeffs = [Fraction(0)] * (degree + 1)
    for e, c in terms:
        coeffs[e] += Fraction(c)
    return DensePolynomial(tuple(coeffs))


def _as_ints(f) -> list[int]:
    if isinstance(f, DensePolynomial):
        return f.integer_primitive()
    return _primitive(_trim([int(c) for c in f]))


def _yun(f: list[int]) -> list[tuple[list[int], int]]:
    out = []
    df = _deriv(f)
    if not df:
        return out
    a = _gcd(f, df)
    b = _divexact(f, a)
    c = _divexact(df, a)
    d = _sub(c, _deriv(b))
    i = 1
    while len(b) > 1:
        a = _gcd(b, d) if d else _primitive(list(b))
        if len(a) > 1:
            out.append((a, i))
        b = _divexact(b, a)
        c = _divexact(d, a) if d else []
        d = _sub(c, _deriv(b))
        i += 1
    return out


def square_free_decomposition(f) -> list[tuple[DensePolynomial, int]]:
    """Yun decomposition ``f = const * prod a_i**i`` with pairwise coprime
    square-free ``a_i`` (primitive, positive leading coefficient)."""
    ints = _as_ints(f)
    if not ints:
        raise ValueError("square-free decomposition of the zero polynomial")
    return [(DensePolynomial.from_ints(a), i) for a, i in _yun(ints)]


def sturm_sequence(f) -> list[list[int]]:
    """Sturm sequence of the square-free integer polynomial ``f``.

    Each member is a positive multiple of the classical negated remainder.
    """
    s0 = _as_ints(f)
    seq = [s0]
    s1 = _deriv(s0)
    if not s1:
        return seq
    seq.append(_primitive(s1))
    while len(seq[-1]) > 1:
        r, delta = _prem(seq[-2], seq[-1])
        if not r:
            break
        if seq[-1][-1] < 0 and delta % 2:
            r = [-c for c in r]
        g = _content(r)
        seq.append([-c // g for c in r])
    return seq


def _variations(seq: list[list[int]], x: Fraction) -> int:
    count = 0
    prev = 0
    for s in seq:
        sg = _sign_at(s, x)
        if sg == 0:
            continue
        if prev and sg != prev:
            count += 1
        prev = sg
    return count


def count_roots(seq: list[list[int]], lo, hi) -> int:
    """Number of distinct roots of ``seq[0]`` in the open interval ``(lo, hi)``."""
    lo, hi = Fraction(lo), Fraction(hi)
    if hi <= lo:
        return 0
    n = _variations(seq, lo) - _variations(seq, hi)
    if _sign_at(seq[0], hi) == 0:
        n -= 1
    return n


def _isolate_factor(a: list[int]) -> list[tuple[Fraction, Fraction]]:
    seq = sturm_sequence(a)
    B = _cauchy_pow2(a)
    out = []
    stack = [(-B, B)]
    while stack:
        lo, hi = stack.pop()
        c = count_roots(seq, lo, hi)
        if c == 0:
            continue
        if c == 1:
            out.append((lo, hi))
            continue
        mid = (lo + hi) / 2
        if _sign_at(a, mid) == 0:
            out.append((mid, mid))
        stack.append((lo, mid))
        stack.append((mid, hi))
    return out


def _shrink(a: list[int], seq, lo: Fraction, hi: Fraction) -> tuple[Fraction, Fraction]:
    mid = (lo + hi) / 2
    if _sign_at(a, mid) == 0:
        return mid, mid
    return (lo, mid) if count_roots(seq, lo, mid) else (mid, hi)


def sturm_isolate(f) -> list[tuple[Fraction, Fraction, int]]:
    """Disjoint isolating intervals ``(lo, hi, multiplicity)`` of all real roots, sorted.

    ``lo == hi`` marks an exactly known root; otherwise the root lies in the
    open interval.
    """
    roots = []
    for a, mult in _yun(_as_ints(f)):
        seq = sturm_sequence(a)
        for lo, hi in _isolate_factor(a):
            roots.append([lo, hi, mult, a, seq])
    while True:
        roots.sort(key=lambda r: (r[0], r[1]))
        clash = False
        for left, right in zip(roots, roots[1:]):
            if right[0] < left[1] or (left[0] == left[1] == right[0] == right[1]):
                clash = True
                for r in (left, right):
                    if r[0] != r[1]:
                        r[0], r[1] = _shrink(r[3], r[4], r[0], r[1])
        if not clash:
            break
    return [(lo, hi, m) for lo, hi, m, _, _ in roots]


# verification ---------------------------------------------------------------

@dataclass
class VerifyReport:
    count_match: bool = True
    multiplicity_match: bool = True
    containment: bool = True
    disjointness: bool = True
    oracle_roots: int = 0
    claimed_roots: int = 0
    diagnostics: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return (self.count_match and self.multiplicity_match
                and self.containment and self.disjointness)

    def to_json(self) -> str:
        return json.dumps({
            "passed": self.passed,
            "count_match": self.count_match,
            "multiplicity_match": self.multiplicity_match,
            "containment": self.containment,
            "disjointness": self.disjointness,
            "oracle_roots": self.oracle_roots,
            "claimed_roots": self.claimed_roots,
            "diagnostics": self.diagnostics,
        }, sort_keys=True)


def _endpoint(x) -> Fraction:
    if hasattr(x, "to_fraction"):
        return x.to_fraction()
    return Fraction(x)


def verify_isolation(p, claimed, cap: int = DEFAULT_CAP,
                     factors: Optional[list] = None) -> VerifyReport:
    """Check claimed roots (objects with ``lo``, ``hi``, ``multiplicity``) of ``p``.

    Each claimed open interval (or exact point when ``lo == hi``) must hold
    exactly one distinct real root, of the right multiplicity; claims must be
    pairwise disjoint and account for every real root.
    """
    report = VerifyReport(claimed_roots=len(claimed))
    dense = densify(p, cap)
    if factors is None:
        factors = _yun(dense.integer_primitive())
    seqs = [(a, m, sturm_sequence(a)) for a, m in factors]

    total = 0
    for a, _, seq in seqs:
        B = _cauchy_pow2(a)
        total += count_roots(seq, -B, B)
    report.oracle_roots = total
    if total != len(claimed):
        report.count_match = False
        report.diagnostics.append(f"oracle has {total} distinct real roots, {len(claimed)} claimed")

    spans = []
    for idx, r in enumerate(claimed):
        lo, hi = _endpoint(r.lo), _endpoint(r.hi)
        spans.append((lo, hi, idx))
        if hi < lo:
            report.containment = False
            report.diagnostics.append(f"root {idx}: empty interval")
            continue
        hits = []
        for a, m, seq in seqs:
            c = (1 if _sign_at(a, lo) == 0 else 0) if lo == hi else count_roots(seq, lo, hi)
            hits.extend([m] * c)
        if len(hits) != 1:
            report.containment = False
            report.diagnostics.append(f"root {idx}: interval holds {len(hits)} oracle roots")
        elif hits[0] != r.multiplicity:
            report.multiplicity_match = False
            report.diagnostics.append(
                f"root {idx}: multiplicity {r.multiplicity}, oracle says {hits[0]}")

    spans.sort()
    for (lo1, hi1, i), (lo2, hi2, j) in zip(spans, spans[1:]):
        if lo2 < hi1 or (lo1 == hi1 == lo2 == hi2):
            report.disjointness = False
            report.diagnostics.append(f"roots {i} and {j} overlap")
    return report
