"""Isolation of all real roots of a sparse integer polynomial.

The roots of ``q`` are found bottom-up along its derivative chain
``p_0 = q, p_1, ..., p_{k-1}``.  Between two consecutive roots of ``p_j`` the
polynomial ``p_{j-1}`` is monotone, so it has a root there iff its signs at the
two flanking roots differ.  A root of ``p_j`` at which ``p_{j-1}`` vanishes is
carried over with its multiplicity increased by one.

Deciding the sign of ``p_{j-1}`` at a root of ``p_j`` is the delicate part.
Once the root sits in an interval of width below ``2**-L`` (``L`` the chain
bound) the value of ``p_{j-1}`` there is either below ``2**-L`` or above
``2**-(L/4)``; a midpoint evaluation to error ``2**-(L/2)`` tells the two
apart.  By default that expensive test is only the last resort: first the
interval is refined geometrically and the sign is certified on the whole
interval by a derivative bound.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .dyadic import Dyadic
from .errors import ContractError, InvariantViolation
from .numeric import BoundSet, certified_sign, chain_bound, eval_approx, interval_sign
from .poly import (
    SparsePolynomial,
    cauchy_exponent,
    derivative_chain,
    reflect,
    strip_power,
)
from .refine import RefineState, refine_root
from .stats import Stats

__all__ = [
    "IsolatedRoot",
    "Stats",
    "sign_at_chain_root",
    "derive_intervals",
    "isolate_positive",
    "isolate_all",
]


@dataclass(frozen=True)
class IsolatedRoot:
    """A real root in ``(lo, hi)``, or exactly at ``lo`` when ``lo == hi``."""

    lo: Dyadic
    hi: Dyadic
    multiplicity: int
    chain_depth: int = 0
    # isolating interval before refinement (simple roots only); not part of identity
    gap: Optional[tuple[Dyadic, Dyadic]] = field(default=None, compare=False)

    def __post_init__(self):
        if self.hi < self.lo:
            raise ContractError("root interval with hi < lo")
        if self.multiplicity < 1:
            raise ContractError("multiplicity must be positive")
        if self.chain_depth == 0:
            object.__setattr__(self, "chain_depth", self.multiplicity)

    @property
    def exact(self) -> bool:
        return self.lo == self.hi

    @property
    def width(self) -> Dyadic:
        return self.hi - self.lo

    def negated(self) -> "IsolatedRoot":
        gap = None if self.gap is None else (-self.gap[1], -self.gap[0])
        return IsolatedRoot(-self.hi, -self.lo, self.multiplicity, self.chain_depth, gap)

    def to_json(self, digits: int = 20) -> dict:
        mid = (self.lo + self.hi).half()
        return {
            "lo": str(self.lo),
            "hi": str(self.hi),
            "exact": self.exact,
            "multiplicity": self.multiplicity,
            "approx": mid.decimal(digits),
        }


def sign_at_chain_root(f: SparsePolynomial, lo: Dyadic, hi: Dyadic, B: BoundSet,
                       stats: Optional[Stats] = None) -> int:
    """Sign of ``f`` at the root isolated by ``(lo, hi)`` of the next chain polynomial.

    Requires ``hi - lo < 2**-L``; returns 0 when ``f`` vanishes at that root.
    """
    width = hi - lo
    if width.sign() < 0 or not width < Dyadic.pow2(-B.L):
        raise ContractError(f"interval width must be below 2^-{B.L}")
    if width.is_zero():
        return certified_sign(f, lo, stats=stats)
    mid = (lo + hi).half()
    approx = eval_approx(f, mid, -B.decision_error_exp, stats).approx
    if abs(approx) <= Dyadic.pow2(B.nonzero_threshold_exp - 1):
        return 0
    return approx.sign()


def derive_intervals(f: SparsePolynomial, chain_roots: list
                     ) -> tuple[list[RefineState], list[IsolatedRoot]]:
    """Split the roots of ``f`` into fresh simple roots and carried-over ones.

    ``chain_roots`` lists ``(lo, hi, sign)`` or ``(lo, hi, sign, depth)`` for the
    roots of the next chain polynomial, sorted and including the two sentinels
    (width-zero entries at ``0`` and at the root bound).  ``sign`` is the sign of
    ``f`` at that root and ``depth`` its multiplicity as a root of the next chain
    polynomial (default 1).
    """
    entries = [tuple(e) + (1,) if len(e) == 3 else tuple(e) for e in chain_roots]
    if len(entries) < 2:
        raise ContractError("chain roots must include both sentinels")
    for end in (entries[0], entries[-1]):
        if end[2] == 0:
            raise ContractError("sentinel sign is zero")
    simple: list[RefineState] = []
    multiple: list[IsolatedRoot] = []
    for left, right in zip(entries, entries[1:]):
        if right[0] < left[1]:
            raise ContractError("chain roots overlap or are unsorted")
        if left[2] * right[2] < 0:
            simple.append(RefineState(left[1], right[0], 4, left[2], right[2]))
    for lo, hi, sign, depth in entries[1:-1]:
        if sign == 0:
            multiple.append(IsolatedRoot(lo, hi, depth + 1, depth + 1))
    return simple, multiple


@dataclass
class _Root:
    """Working record of a root of the current chain polynomial."""

    lo: Dyadic
    hi: Dyadic
    depth: int
    state: Optional[RefineState] = field(default=None)

    def sync(self, state: RefineState):
        self.state = state
        self.lo, self.hi = state.a, state.b


def _width_bits_reached(r: _Root, bits: int) -> bool:
    return r.lo == r.hi or r.hi - r.lo < Dyadic.pow2(-bits)


def _sign_lazy(f, g, r: _Root, B: BoundSet, stats, strict: bool) -> int:
    """Sign of ``f`` at the root ``r`` of ``g``, refining ``r`` as needed."""
    L = B.L
    if r.lo == r.hi:
        return certified_sign(f, r.lo, stats=stats)
    if strict:
        if r.state is not None and not _width_bits_reached(r, L):
            r.sync(refine_root(g, r.state, L, stats))
    else:
        bits = max(16, -(r.hi - r.lo).log2_floor())
        while True:
            if r.lo == r.hi:
                return certified_sign(f, r.lo, stats=stats)
            s = interval_sign(f, r.lo, r.hi, stats)
            if s:
                return s
            if _width_bits_reached(r, L) or r.state is None:
                break
            bits = min(2 * bits, L)
            r.sync(refine_root(g, r.state, bits, stats))
    if r.lo == r.hi:
        return certified_sign(f, r.lo, stats=stats)
    if not _width_bits_reached(r, L):
        raise InvariantViolation("multiple chain root wider than the separation bound")
    return sign_at_chain_root(f, r.lo, r.hi, B, stats)


def isolate_positive(q: SparsePolynomial, stats: Optional[Stats] = None,
                     width_bits: Optional[int] = None,
                     strict: bool = False) -> list[IsolatedRoot]:
    """All roots of ``q`` in ``(0, inf)`` with multiplicities.

    Simple roots are refined to width below ``2**-width_bits`` (default: the
    chain bound ``L``).  Multiple roots keep their certification interval of
    width below ``2**-L``.  With ``strict`` every intermediate root is refined
    to ``2**-L`` before any sign decision.
    """
    if q.is_zero() or q.terms[0][0] != 0:
        raise ContractError("isolate_positive needs a nonzero constant term")
    if len(q.terms) == 1:
        return []
    if stats is None:
        stats = Stats()
    n, k = q.degree, q.k
    B = chain_bound(n, q.coeff_bits(), k)
    L = B.L
    target = L if width_bits is None else width_bits
    if target < 1:
        raise ContractError("width_bits must be positive")
    top = Dyadic.pow2(cauchy_exponent(q))
    chain = derivative_chain(q)

    roots: list[_Root] = []  # roots of chain[j], sorted
    for j in range(len(chain) - 1, 0, -1):
        g, f = chain[j], chain[j - 1]
        entries = [(Dyadic(0), Dyadic(0), certified_sign(f, Dyadic(0), stats=stats), 0)]
        for r in roots:
            sign = _sign_lazy(f, g, r, B, stats, strict)  # may narrow r
            entries.append((r.lo, r.hi, sign, r.depth))
        top_sign = certified_sign(f, top, stats=stats)
        entries.append((top, top, top_sign, 0))
        simple, multiple = derive_intervals(f, entries)
        fresh = []
        for s in simple:
            if strict:
                s = refine_root(f, s, L, stats)
            fresh.append(_Root(s.a, s.b, 1, s))
        fresh.extend(_Root(m.lo, m.hi, m.multiplicity) for m in multiple)
        fresh.sort(key=lambda r: r.lo)
        roots = fresh

    out = []
    for r in roots:
        gap = None
        if r.state is not None:
            gap = (r.lo, r.hi)
            if not _width_bits_reached(r, target):
                r.sync(refine_root(q, r.state, target, stats))
        out.append(IsolatedRoot(r.lo, r.hi, r.depth, r.depth, gap))
    _check_disjoint(out)
    return out


def _check_disjoint(roots: list[IsolatedRoot]):
    for a, b in zip(roots, roots[1:]):
        if b.lo < a.hi or (a.exact and b.exact and a.lo == b.lo):
            raise InvariantViolation("isolating intervals overlap")


def isolate_all(p: SparsePolynomial, stats: Optional[Stats] = None,
                width_bits: Optional[int] = None,
                strict: bool = False) -> list[IsolatedRoot]:
    """All real roots of ``p``, sorted, with multiplicities."""
    q, i0 = strip_power(p)
    if stats is None:
        stats = Stats()
    out = [r.negated() for r in reversed(isolate_positive(reflect(q), stats, width_bits, strict))]
    if i0:
        out.append(IsolatedRoot(Dyadic(0), Dyadic(0), i0, i0))
    out.extend(isolate_positive(q, stats, width_bits, strict))
    _check_disjoint(out)
    return out
