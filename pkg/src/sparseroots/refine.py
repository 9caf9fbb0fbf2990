"""Refinement of isolating intervals of simple roots.

Each step tries a Newton-type jump into a subinterval of relative width
about ``1/N``, then a test for a root very close to either endpoint, and
falls back to (perturbed) bisection.  ``N`` squares after every successful
jump and drops to ``max(4, sqrt(N))`` after a bisection, which gives
quadratic convergence once the root is well separated.  A candidate
subinterval is accepted iff ``p`` has opposite signs at its endpoints.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import isqrt
from typing import Optional

from gmpy2 import mpz

from .dyadic import Dyadic
from .errors import ContractError, InvariantViolation
from .numeric import (
    FloatValue,
    MultipointSet,
    admissible_with_sign,
    certified_sign,
    eval_float,
    min_precision,
)
from .poly import SparsePolynomial, eval_exact
from .stats import Stats

__all__ = [
    "RefineState",
    "newton_test",
    "boundary_test",
    "bisect_step",
    "refine_root",
    "refine_all",
]


def _ceil_log2(n: int) -> int:
    return (n - 1).bit_length() if n > 1 else 0


def _is_speed(N: int) -> bool:
    if N < 4 or N & (N - 1):
        return False
    m = N.bit_length() - 1
    return m & (m - 1) == 0


@dataclass(frozen=True)
class RefineState:
    """Isolating interval ``(a, b)`` with cached endpoint signs and speed ``N``.

    ``a == b`` denotes an exactly located root; its signs are 0.
    """

    a: Dyadic
    b: Dyadic
    N: int = 4
    sign_a: int = 0
    sign_b: int = 0

    def __post_init__(self):
        if self.a == self.b:
            if self.sign_a or self.sign_b:
                raise ContractError("an exact point carries no endpoint signs")
            return
        if not self.a < self.b:
            raise ContractError(f"empty interval ({self.a}, {self.b})")
        if self.sign_a * self.sign_b != -1:
            raise ContractError("interval endpoints must have strictly opposite signs")
        if not _is_speed(self.N):
            raise ContractError(f"N = {self.N} is not of the form 2^(2^m)")

    @classmethod
    def point(cls, x: Dyadic) -> "RefineState":
        return cls(x, x, 4, 0, 0)

    @classmethod
    def start(cls, p: SparsePolynomial, a: Dyadic, b: Dyadic,
              stats: Optional[Stats] = None) -> "RefineState":
        """Initial state for ``(a, b)`` with endpoint signs computed from ``p``."""
        return cls(a, b, 4, certified_sign(p, a, stats=stats),
                   certified_sign(p, b, stats=stats))

    @property
    def is_point(self) -> bool:
        return self.a == self.b

    @property
    def width(self) -> Dyadic:
        return self.b - self.a

    @property
    def log2_N(self) -> int:
        return self.N.bit_length() - 1

    def contains(self, other: "RefineState") -> bool:
        return self.a <= other.a and other.b <= self.b


# Newton test ------------------------------------------------------------
#
# All quantities are integers in units of u = w * 2**-F with F large enough that
# the candidate points, and hence their distances, are exact multiples of u.

_DISCARD = "discard"
_PROCEED = "proceed"
_INF = "inf"


def _floor_div(num: Dyadic, den: Dyadic, F: int) -> int:
    """``floor(num * 2**F / den)`` for ``den > 0``."""
    s = num.exponent - den.exponent + F
    if s >= 0:
        return int((mpz(num.mantissa) << s) // den.mantissa)
    return int(mpz(num.mantissa) // (mpz(den.mantissa) << -s))


def _ceil_div(num: Dyadic, den: Dyadic, F: int) -> int:
    return -_floor_div(-num, den, F)


def _ratio_bounds(P: FloatValue, D: FloatValue, w: Dyadic, F: int, clamp: int):
    """Integer enclosure ``[lo, hi]`` of ``p/(p' u)``, endpoints clamped to ``+-clamp``.

    Clamping is harmless: any value beyond ``clamp * u = 8w`` is rejected either way.
    """
    if D.approx.sign() < 0:
        P = FloatValue(-P.approx, P.err, P.prec)
        D = FloatValue(-D.approx, D.err, D.prec)
    dens = ((D.approx - D.err) * w, (D.approx + D.err) * w)
    los, his = [], []
    for num in (P.approx - P.err, P.approx + P.err):
        for den in dens:
            if num.is_zero():
                los.append(0)
                his.append(0)
            elif num.log2_floor() - den.log2_floor() > 8:
                v = clamp if num.sign() > 0 else -clamp
                los.append(v)
                his.append(v)
            else:
                los.append(max(-clamp, _floor_div(num, den, F)))
                his.append(min(clamp, _ceil_div(num, den, F)))
    return min(los), max(his)


class _QuotientCache:
    """Interval enclosures of ``p(x)/p'(x)`` at a fixed point, per precision."""

    def __init__(self, p, dp, x: Dyadic, w: Dyadic, F: int, stats):
        self.p, self.dp, self.x, self.stats = p, dp, x, stats
        self.w, self.F = w, F
        n = p.terms[-1][0]
        self.cap = x.bits() * n + p.coeff_bits() + n.bit_length() + 64
        self._cache: dict[int, object] = {}

    def values(self, prec: int) -> tuple[FloatValue, FloatValue]:
        if prec > self.cap:
            if self.stats is not None:
                self.stats.evaluations += 2
            return (FloatValue(eval_exact(self.p, self.x), Dyadic(0), prec),
                    FloatValue(eval_exact(self.dp, self.x), Dyadic(0), prec))
        return (eval_float(self.p, self.x, prec, self.stats),
                eval_float(self.dp, self.x, prec, self.stats))

    def interval(self, prec: int):
        """Integer ``(lo, hi)``, ``_INF`` if ``p'(x) == 0``, None if undecided."""
        if prec in self._cache:
            return self._cache[prec]
        P, D = self.values(prec)
        if D.exact and D.approx.is_zero():
            out = _INF
        elif abs(D.approx) <= D.err:
            out = None
        else:
            out = _ratio_bounds(P, D, self.w, self.F, 1 << (self.F + 3))
        self._cache[prec] = out
        return out


def _abs_lower(iv) -> int:
    lo, hi = iv
    if lo <= 0 <= hi:
        return 0
    return min(abs(lo), abs(hi))


def _abs_upper(iv) -> int:
    return max(abs(iv[0]), abs(iv[1]))


def _classify(vi, vj, F: int, n: int):
    if vi is _INF or vj is _INF:
        return _DISCARD
    if vi is None or vj is None:
        return None
    one = 1 << F  # w in units
    diff = (vi[0] - vj[1], vi[1] - vj[0])
    if max(_abs_lower(vi), _abs_lower(vj)) > one or 4 * n * _abs_upper(diff) < one:
        return _DISCARD
    if (_abs_upper(vi) < 2 * one and _abs_upper(vj) < 2 * one
            and 8 * n * _abs_lower(diff) > one):
        return _PROCEED
    return None


def _floor_q(a: int, b: int) -> int:
    return int(mpz(a) // b)


def _ceil_q(a: int, b: int) -> int:
    return -int(mpz(-a) // b)


def newton_test(p: SparsePolynomial, s: RefineState, stats: Optional[Stats] = None,
                dp: Optional[SparsePolynomial] = None) -> Optional[RefineState]:
    """Try to jump to a subinterval of width in ``[w/(8N), w/N]``; None on failure."""
    if s.is_point:
        return None
    if dp is None:
        dp = p.derivative()
    n, k = p.terms[-1][0], len(p.terms)
    w = s.width
    log2N = s.log2_N
    eps_exp = -(5 + _ceil_log2(n))
    # resolution: lambda's rounding error is below (8n + 256n^2) units, which must
    # stay under w/(32N); u must also divide the candidate offsets
    F = log2N + 2 * _ceil_log2(n) + 20
    spacing = w.shift(eps_exp)
    quarter = w.shift(-2)
    stars = []
    for j in (1, 2, 3):
        star, _ = admissible_with_sign(p, MultipointSet(s.a + quarter * j, spacing, k), stats)
        stars.append(star)
    quotients = [_QuotientCache(p, dp, x, w, F, stats) for x in stars]
    # offsets of the candidate points from a, exact in units of u
    offsets = [_floor_div(x - s.a, w, F) for x in stars]
    tol = 1 << (F - 4 - log2N)  # w/(16N): the midpoint is then within w/(32N)

    active = [(0, 1), (0, 2), (1, 2)]
    prec = min_precision(n)
    while active:
        for pair in list(active):
            i, j = pair
            verdict = _classify(quotients[i].interval(prec), quotients[j].interval(prec), F, n)
            if verdict is None:
                continue
            active.remove(pair)
            if verdict is _DISCARD:
                continue
            x = _approximate_lambda(quotients, i, j, offsets, prec, tol)
            if x is None:
                continue
            result = _newton_candidate(p, s, x, F, log2N, eps_exp, k, stats)
            if result is not None:
                return result
        prec *= 2
    return None


def _approximate_lambda(quotients, i, j, offsets, prec, tol) -> Optional[int]:
    """Offset of the Newton-secant point from ``a`` in units of u, or None."""
    d = offsets[j] - offsets[i]
    while True:
        vi, vj = quotients[i].interval(prec), quotients[j].interval(prec)
        if vi is _INF or vj is _INF:
            return None
        if vi is not None and vj is not None:
            den = (vi[0] - vj[1], vi[1] - vj[0])
            if den[0] > 0 or den[1] < 0:
                nums = (vi[0] * d, vi[1] * d)
                lo = min(_floor_q(a, b) for a in nums for b in den)
                hi = max(_ceil_q(a, b) for a in nums for b in den)
                if hi - lo <= tol:
                    return offsets[i] + (lo + hi) // 2
        if prec > quotients[i].cap and prec > quotients[j].cap:
            return None  # exact values and still too coarse; cannot happen for valid F
        prec *= 2


def _newton_candidate(p, s: RefineState, x: int, F: int, log2N: int, eps_exp: int,
                      k: int, stats) -> Optional[RefineState]:
    N = s.N
    if x < 0 or x > 1 << F:
        return None
    ell = x >> (F - 2 - log2N)
    cell = s.width.shift(-(2 + log2N))
    lo = s.a + cell * max(0, ell - 1)
    hi = s.a + cell * min(4 * N, ell + 2)
    spacing = s.width.shift(eps_exp - log2N)
    if lo == s.a:
        sl = s.sign_a
    else:
        lo, sl = admissible_with_sign(p, MultipointSet(lo, spacing, k), stats)
        if sl == 0:
            return RefineState.point(lo)
    if hi == s.b:
        sh = s.sign_b
    else:
        hi, sh = admissible_with_sign(p, MultipointSet(hi, spacing, k), stats)
        if sh == 0:
            return RefineState.point(hi)
    if sl * sh < 0:
        return RefineState(lo, hi, N * N, sl, sh)
    return None


# Boundary test and bisection ---------------------------------------------

def boundary_test(p: SparsePolynomial, s: RefineState,
                  stats: Optional[Stats] = None) -> Optional[RefineState]:
    """Detect a root within ``w/N`` of an endpoint; None on failure."""
    if s.is_point:
        return None
    n, k = p.terms[-1][0], len(p.terms)
    w = s.width
    log2N = s.log2_N
    offset = w.shift(-(1 + log2N))
    spacing = w.shift(-(2 + _ceil_log2(n)) - log2N)
    ml, sl = admissible_with_sign(p, MultipointSet(s.a + offset, spacing, k), stats)
    if sl == 0:
        return RefineState.point(ml)
    if s.sign_a * sl < 0:
        return RefineState(s.a, ml, s.N * s.N, s.sign_a, sl)
    mr, sr = admissible_with_sign(p, MultipointSet(s.b - offset, spacing, k), stats)
    if sr == 0:
        return RefineState.point(mr)
    if s.sign_b * sr < 0:
        return RefineState(mr, s.b, s.N * s.N, sr, s.sign_b)
    return None


def bisect_step(p: SparsePolynomial, s: RefineState,
                stats: Optional[Stats] = None) -> RefineState:
    """Split at an admissible point near the midpoint; ``N`` drops to ``max(4, sqrt N)``."""
    if s.is_point:
        return s
    n, k = p.terms[-1][0], len(p.terms)
    w = s.width
    spacing = w.shift(-(2 + _ceil_log2(n)))
    m, sm = admissible_with_sign(p, MultipointSet((s.a + s.b).half(), spacing, k), stats)
    if sm == 0:
        return RefineState.point(m)
    N = max(4, isqrt(s.N))
    if s.sign_a * sm < 0:
        return RefineState(s.a, m, N, s.sign_a, sm)
    return RefineState(m, s.b, N, sm, s.sign_b)


# Driver -------------------------------------------------------------------

def _check_step(old: RefineState, new: RefineState, kind: str):
    if new.is_point:
        if not old.a <= new.a <= old.b:
            raise InvariantViolation("exact root outside the current interval")
        return
    if not old.contains(new):
        raise InvariantViolation(f"{kind} step left the interval")
    if new.sign_a != old.sign_a or new.sign_b != old.sign_b:
        raise InvariantViolation(f"{kind} step lost the sign change")
    w, w2 = old.width, new.width
    if kind == "bisect":
        if w2.shift(2) > w * 3:
            raise InvariantViolation("bisection contracted by less than 3/4")
        if new.N != max(4, isqrt(old.N)):
            raise InvariantViolation("N not reduced after bisection")
    else:
        if w2 * old.N > w:
            raise InvariantViolation(f"{kind} step contracted by less than 1/N")
        if new.N != old.N * old.N:
            raise InvariantViolation("N not squared after a successful step")


def refine_root(p: SparsePolynomial, s0: RefineState, L: int,
                stats: Optional[Stats] = None, trace: Optional[list] = None) -> RefineState:
    """Refine ``s0`` until its width is below ``2**-L`` (or the root is hit exactly).

    ``trace``, when given, receives ``(kind, old_width, new_width, old_N)`` per step.
    """
    if s0.is_point:
        return s0
    target = Dyadic.pow2(-L)
    dp = p.derivative()
    s = s0
    while s.width >= target:
        new = newton_test(p, s, stats, dp)
        kind = "newton"
        if new is None:
            new = boundary_test(p, s, stats)
            kind = "boundary"
        if new is None:
            new = bisect_step(p, s, stats)
            kind = "bisect"
        if stats is not None:
            stats.refinement_iterations += 1
        _check_step(s, new, kind)
        if trace is not None:
            trace.append((kind, s.width, new.width, s.N))
        s = new
        if s.is_point:
            break
    return s


def refine_all(p: SparsePolynomial, states: list[RefineState], L: int,
               stats: Optional[Stats] = None) -> list[RefineState]:
    out = [refine_root(p, s, L, stats) for s in states]
    for left, right in zip(out, out[1:]):
        if right.a < left.b or (left.is_point and right.is_point and left.a == right.a):
            raise InvariantViolation("refined intervals overlap")
    return out
