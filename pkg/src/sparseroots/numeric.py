"""Adaptive-precision evaluation of sparse polynomials at dyadic points.

The workhorse is :func:`eval_float`, a floating evaluation with ``prec``-bit
mantissas whose result carries a rigorous absolute error bound.  Powers are
formed by repeated squaring, so one evaluation costs ``O(k log n)``
multiplications of ``prec``-bit numbers regardless of how large ``|p(x)|`` is.

Error model: every rounding truncates a mantissa to ``prec`` bits, a relative
error of at most ``u = 2**(1-prec)``.  Each approximated term carries the
number ``c`` of rounding factors ``(1+delta)`` it accumulated (a value rounded
before being squared counts twice, and so on).  With ``c*u <= 1/4`` the term
error is below ``4*c*u*|term|``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import gmpy2
from gmpy2 import mpz

from .dyadic import Dyadic
from .errors import BoundOverflowError, DegenerateMultipointError
from .poly import SparsePolynomial, eval_exact
from .stats import Stats

__all__ = [
    "FloatValue",
    "ApproxValue",
    "MultipointSet",
    "BoundSet",
    "eval_float",
    "eval_approx",
    "certified_sign",
    "admissible_point",
    "eval_sep_bound",
    "chain_bound",
    "ceil_log2_upper",
    "interval_sign",
]

_MAX_L = 2**62 - 1


@dataclass(frozen=True)
class FloatValue:
    """``|approx - p(x)| <= err``; ``err == 0`` means the value is exact."""

    approx: Dyadic
    err: Dyadic
    prec: int

    @property
    def exact(self) -> bool:
        return self.err.is_zero()

    def certified_sign(self) -> Optional[int]:
        """Sign if the error ball excludes zero (or the value is exact), else None."""
        if self.exact:
            return self.approx.sign()
        if abs(self.approx) > self.err:
            return self.approx.sign()
        return None

    def upper(self) -> Dyadic:
        return abs(self.approx) + self.err

    def lower(self) -> Dyadic:
        lo = abs(self.approx) - self.err
        return lo if lo.sign() > 0 else Dyadic(0)


@dataclass(frozen=True)
class ApproxValue:
    """``|approx - p(x)| < 2**-K``."""

    approx: Dyadic
    K: int

    def __post_init__(self):
        if self.K < 1:
            raise ValueError("error exponent K must be positive")


def _round(m, e: int, prec: int):
    b = m.bit_length()
    if b <= prec:
        return m, e, 0
    s = b - prec
    return m >> s, e + s, 1


def min_precision(n: int) -> int:
    """Smallest working precision for which the error model is valid at degree ``n``."""
    return max(32, (2 * n + n.bit_length() + 2).bit_length() + 4)


def _pow2_sum_upper(exponents: Sequence[int]) -> Dyadic:
    """Upper bound for ``sum(2**y for y in exponents)`` with a 64-bit mantissa."""
    if not exponents:
        return Dyadic(0)
    top = max(exponents)
    base = top - 64
    acc = 0
    for y in exponents:
        acc += (1 << (y - base)) if y >= base else 1
    return Dyadic(acc, base)


def eval_float(p: SparsePolynomial, x: Dyadic, prec: int,
               stats: Optional[Stats] = None) -> FloatValue:
    """Evaluate ``p(x)`` with ``prec``-bit mantissas and a certified error bound."""
    if stats is not None:
        stats.evaluations += 1
    terms = p.terms
    if not terms:
        return FloatValue(Dyadic(0), Dyadic(0), prec)
    prec = max(prec, min_precision(terms[-1][0]))
    if stats is not None and prec > stats.max_precision_bits:
        stats.max_precision_bits = prec
    if x.mantissa == 0:
        c0 = terms[0][1] if terms[0][0] == 0 else 0
        return FloatValue(Dyadic(c0), Dyadic(0), prec)

    xm, xe, rx = _round(mpz(x.mantissa), x.exponent, prec)
    # squares[j] = (mantissa, exponent, rounding count) approximating x^(2^j)
    squares = [(xm, xe, rx)]
    for _ in range(terms[-1][0].bit_length() - 1):
        sm, se, sc = squares[-1]
        sm = sm * sm
        se *= 2
        sc *= 2
        b = sm.bit_length()
        if b > prec:
            sm >>= b - prec
            se += b - prec
            sc += 1
        squares.append((sm, se, sc))
    parts = []
    for i, a in terms:
        if i == 0:
            parts.append((mpz(a), 0, 0))
            continue
        rm = None
        re = rc = 0
        j = 0
        while i:
            if i & 1:
                sm, se, sc = squares[j]
                if rm is None:
                    rm, re, rc = sm, se, sc
                else:
                    rm = rm * sm
                    re += se
                    rc += sc
                    b = rm.bit_length()
                    if b > prec:
                        rm >>= b - prec
                        re += b - prec
                        rc += 1
            i >>= 1
            j += 1
        rm = rm * a
        b = rm.bit_length()
        if b > prec:
            rm >>= b - prec
            re += b - prec
            rc += 1
        parts.append((rm, re, rc))

    tops = [te + tm.bit_length() for tm, te, _ in parts if tm]
    if not tops:
        # every approximated term is zero; only possible for exact zero terms
        return FloatValue(Dyadic(0), Dyadic(0), prec)
    guard = len(parts).bit_length() + 2
    floor_exp = max(tops) - prec - guard
    lowest = min(te for tm, te, _ in parts if tm)
    if lowest >= floor_exp:
        floor_exp = lowest
    total = mpz(0)
    err_exps = []
    for tm, te, tc in parts:
        if not tm:
            continue
        if te >= floor_exp:
            total += tm << (te - floor_exp)
        else:
            total += tm >> (floor_exp - te)
            err_exps.append(floor_exp)
        if tc:
            # tc * 2^(3-prec) * |t~| < 2^(bitlen(tc) + 3 - prec + te + bitlen(tm))
            err_exps.append(tc.bit_length() + 3 - prec + te + tm.bit_length())
    return FloatValue(Dyadic(int(total), floor_exp), _pow2_sum_upper(err_exps), prec)


def _magnitude_bits(p: SparsePolynomial, x: Dyadic) -> int:
    """Rough upper estimate of ``log2 max_i |a_i x^i|``."""
    if x.is_zero():
        return p.coeff_bits()
    lx = x.log2_floor() + 1
    return max(abs(c).bit_length() + i * lx for i, c in p.terms)


def eval_approx(p: SparsePolynomial, x: Dyadic, K: int,
                stats: Optional[Stats] = None) -> ApproxValue:
    """Approximate ``p(x)`` to absolute error below ``2**-K``."""
    if K < 1:
        raise ValueError("K must be positive")
    prec = max(64, K + _magnitude_bits(p, x) + 16)
    while True:
        fv = eval_float(p, x, prec, stats)
        if fv.exact or fv.err < Dyadic.pow2(-K):
            return ApproxValue(fv.approx, K)
        gap = fv.err.log2_floor() + 1 + K + 8
        prec += max(gap, prec // 2)


def _exact_cost_bits(p: SparsePolynomial, x: Dyadic) -> int:
    return x.bits() * (p.terms[-1][0] if p.terms else 0) + p.coeff_bits() + 64


def certified_sign(p: SparsePolynomial, x: Dyadic, K_cap: Optional[int] = None,
                   stats: Optional[Stats] = None) -> int:
    """Sign of ``p(x)``: precision doubling, then exact evaluation past ``K_cap`` bits."""
    if not p.terms:
        return 0
    if x.is_zero():
        c0 = p.terms[0][1] if p.terms[0][0] == 0 else 0
        return (c0 > 0) - (c0 < 0)
    cap = K_cap if K_cap is not None else _exact_cost_bits(p, x)
    prec = min_precision(p.terms[-1][0])
    while prec <= cap:
        s = eval_float(p, x, prec, stats).certified_sign()
        if s is not None:
            return s
        prec *= 2
    if stats is not None:
        stats.evaluations += 1
    return eval_exact(p, x).sign()


@dataclass(frozen=True)
class MultipointSet:
    """The ``2*ceil(k/2)+1`` points ``center + (i - ceil(k/2)) * spacing``."""

    center: Dyadic
    spacing: Dyadic
    k: int

    def __post_init__(self):
        if self.spacing.sign() < 0:
            raise ValueError("multipoint spacing must be non-negative")
        if self.k < 1:
            raise ValueError("multipoint needs k >= 1")

    @property
    def half(self) -> int:
        return (self.k + 1) // 2

    def points(self) -> list[Dyadic]:
        h = self.half
        return [self.center + self.spacing * (i - h) for i in range(2 * h + 1)]


def ceil_log2_upper(u: Dyadic) -> int:
    """Smallest ``c`` with ``u <= 2**c`` for ``u > 0``."""
    m = abs(u.mantissa)
    return u.exponent if m == 1 else m.bit_length() + u.exponent


def _admissible(p: SparsePolynomial, points: Sequence[Dyadic],
                stats: Optional[Stats]) -> tuple[int, int, int]:
    """Index, ``t`` and sign of an admissible point (lock-step precision doubling)."""
    n = p.terms[-1][0]
    prec = min_precision(n)
    cap = max(x.bits() for x in points) * n + p.coeff_bits() + 64
    while True:
        if prec > cap:
            vals = []
            for x in points:
                if stats is not None:
                    stats.evaluations += 1
                vals.append(FloatValue(eval_exact(p, x), Dyadic(0), prec))
        else:
            vals = [eval_float(p, x, prec, stats) for x in points]
        uppers = [fv.upper() for fv in vals]
        best = None
        for idx, fv in enumerate(vals):
            a = abs(fv.approx)
            if a.is_zero() or fv.err.shift(3) > a:
                continue
            t = ceil_log2_upper(uppers[idx]) - 1
            if best is None or t > best[1]:
                best = (idx, t, fv.approx.sign())
        if best is not None:
            bound = Dyadic.pow2(best[1] + 1)
            if all(u <= bound for u in uppers):
                return best
        elif all(fv.exact and fv.approx.is_zero() for fv in vals):
            raise DegenerateMultipointError("polynomial vanishes on the whole multipoint set")
        prec *= 2


def admissible_point(p: SparsePolynomial, M: MultipointSet,
                     stats: Optional[Stats] = None) -> tuple[Dyadic, int]:
    """Return ``(m_star, t)`` with ``m_star`` admissible and
    ``2**(t-1) <= |p(m_star)| <= max_i |p(m_i)| <= 2**(t+1)``."""
    points = M.points()
    idx, t, _ = _admissible(p, points, stats)
    return points[idx], t


def admissible_with_sign(p: SparsePolynomial, M: MultipointSet,
                         stats: Optional[Stats] = None) -> tuple[Dyadic, int]:
    """Admissible point and the (certified) sign of ``p`` there.

    If ``p`` vanishes on every point the center is returned with sign 0.
    """
    points = M.points()
    try:
        idx, _, sign = _admissible(p, points, stats)
    except DegenerateMultipointError:
        return M.center, 0
    return points[idx], sign


@dataclass(frozen=True)
class BoundSet:
    """Thresholds derived from a separation/evaluation bound ``L``."""

    L: int

    def __post_init__(self):
        if self.L < 128:
            raise ValueError("L must be at least 128")

    @property
    def zero_threshold_exp(self) -> int:
        return -self.L

    @property
    def nonzero_threshold_exp(self) -> int:
        return -(self.L // 4)

    @property
    def decision_error_exp(self) -> int:
        return -(self.L // 2)


def _clog2(n: int) -> int:
    # ceil(log2(n + 1)) for n >= 0
    return n.bit_length()


def _checked(L: int) -> BoundSet:
    if L > _MAX_L:
        raise BoundOverflowError(f"L = {L} does not fit in 62 bits")
    return BoundSet(L)


def eval_sep_bound(n: int, mu: int) -> BoundSet:
    """``L = 128 n (ceil(log2(n+1)) + mu)``."""
    if n < 1 or mu < 1:
        raise ValueError("n and mu must be positive")
    return _checked(128 * n * (_clog2(n) + mu))


def chain_bound(n: int, tau: int, k: int) -> BoundSet:
    """``L = 128 n (tau + (k+1) ceil(log2(n+1)))``, valid for every pair of the chain."""
    if n < 1 or tau < 1 or k < 1:
        raise ValueError("n, tau and k must be positive")
    return _checked(128 * n * (tau + (k + 1) * _clog2(n)))


def _abs_derivative(p: SparsePolynomial) -> SparsePolynomial:
    return SparsePolynomial._raw(tuple((e - 1, abs(e * c)) for e, c in p.terms if e))


def interval_sign(p: SparsePolynomial, lo: Dyadic, hi: Dyadic,
                  stats: Optional[Stats] = None) -> int:
    """Sign of ``p`` if it is certified constant and nonzero on ``[lo, hi]``, else 0.

    Uses ``|p(x) - p(c)| <= r * sum |i a_i| R**(i-1)`` with ``c`` the midpoint,
    ``r`` the radius and ``R = max(|lo|, |hi|)``.
    """
    if not p.terms:
        return 0
    mid = (lo + hi).half()
    radius = (hi - lo).half()
    big = max(abs(lo), abs(hi))
    dp = _abs_derivative(p)
    slope = Dyadic(0)
    if dp.terms:
        fd = eval_float(dp, big, 64, stats)
        slope = fd.upper()
    spread = radius * slope
    prec = min_precision(p.terms[-1][0])
    while True:
        fv = eval_float(p, mid, prec, stats)
        if abs(fv.approx) > fv.err + spread:
            return fv.approx.sign()
        if fv.exact or fv.err <= spread:
            return 0
        prec *= 2
