from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from conftest import golden
from sparseroots import (
    BoundOverflowError,
    DegenerateMultipointError,
    Dyadic,
    MultipointSet,
    SparsePolynomial,
    admissible_point,
    certified_sign,
    chain_bound,
    derivative_chain,
    eval_approx,
    eval_exact,
    eval_sep_bound,
    parse,
    strip_power,
)
from sparseroots.numeric import BoundSet, interval_sign
from sparseroots.oracle import densify, sturm_isolate
from sparseroots.refine import RefineState, refine_root
from sparseroots.stats import Stats

from test_poly import sparse_polys


def _root_near(p, approx, bits=80):
    """Refined interval around the oracle root of p closest to ``approx``."""
    lo, hi, _ = min(sturm_isolate(densify(p)),
                    key=lambda r: abs(float(r[0] + r[1]) / 2 - approx))
    a, b = Dyadic.from_fraction(lo), Dyadic.from_fraction(hi)
    return refine_root(p, RefineState.start(p, a, b), bits)


# eval_approx ----------------------------------------------------------------

def test_eval_approx_simple():
    v = eval_approx(parse("x^2 - 2"), Dyadic(3, -1), 10)
    assert abs(v.approx.to_fraction() - Fraction(1, 4)) < Fraction(1, 2**10)
    assert v.K == 10


def test_eval_approx_rejects_bad_K():
    with pytest.raises(ValueError):
        eval_approx(parse("x"), Dyadic(1), 0)


def test_third_chain_poly_at_root_of_fourth():
    chain = derivative_chain(golden())
    s = refine_root(chain[4], RefineState.start(chain[4], Dyadic(0), Dyadic(8)), 80)
    assert 1.326 < float(s.a) < 1.327
    v = eval_approx(chain[3], (s.a + s.b).half(), 20).approx
    assert round(float(v)) == -1943


def test_golden_at_first_root_of_chain_poly():
    chain = derivative_chain(golden())
    s = _root_near(chain[1], 1.356)
    v = float(eval_approx(chain[0], (s.a + s.b).half(), 20).approx)
    assert 2.5e4 < v < 3.5e4


@given(sparse_polys(), st.integers(-(2**30), 2**30), st.integers(-30, 0), st.integers(1, 200))
@settings(max_examples=150)
def test_eval_approx_error_bound(p, m, e, K):
    x = Dyadic(m, e)
    v = eval_approx(p, x, K)
    err = abs(v.approx.to_fraction() - eval_exact(p, x).to_fraction())
    assert err < Fraction(1, 2**K)


# certified_sign ---------------------------------------------------------------

def test_certified_sign_examples():
    assert certified_sign(parse("x^2 - 2"), Dyadic(2)) == 1
    assert certified_sign(parse("x^2 - 1"), Dyadic(1)) == 0
    assert certified_sign(derivative_chain(golden())[4], Dyadic(8)) == 1
    assert certified_sign(derivative_chain(golden())[4], Dyadic(0)) == -1


def test_certified_sign_exact_fallback_with_small_cap():
    stats = Stats()
    assert certified_sign(parse("x^2 - 1"), Dyadic(1), K_cap=1, stats=stats) == 0
    assert stats.evaluations >= 1


def test_certified_sign_tiny_nonzero_value():
    # (x - 1)^2 at 1 + 2^-200 is 2^-400
    p = parse("x^2 - 2x + 1")
    assert certified_sign(p, Dyadic(1) + Dyadic.pow2(-200)) == 1


# admissible points ----------------------------------------------------------------

def _check_admissible(p, M, m_star, t):
    vals = [abs(eval_exact(p, x).to_fraction()) for x in M.points()]
    lam = max(vals)
    v = abs(eval_exact(p, m_star).to_fraction())
    assert m_star in M.points()
    assert v >= lam / 4
    assert Fraction(2) ** (t - 1) <= v <= lam <= Fraction(2) ** (t + 1)


def test_admissible_identity_polynomial():
    p = parse("x")
    M = MultipointSet(Dyadic(1), Dyadic(1, -2), 2)
    assert M.points() == [Dyadic(3, -2), Dyadic(1), Dyadic(5, -2)]
    m_star, t = admissible_point(p, M)
    assert (m_star, t) == (Dyadic(5, -2), 0)
    _check_admissible(p, M, m_star, t)


def test_admissible_on_fourth_chain_poly():
    p4 = derivative_chain(golden())[4]
    assert p4 == parse("441600x^2 - 777216")
    M = MultipointSet(Dyadic(1), Dyadic(1, -4), 6)
    pts = M.points()
    assert len(pts) == 7 and pts[0] == Fraction(13, 16)
    vals = [abs(eval_exact(p4, x).to_fraction()) for x in pts]
    assert max(vals) == vals[0] == 485691
    m_star, t = admissible_point(p4, M)
    _check_admissible(p4, M, m_star, t)


def test_admissible_degenerate():
    with pytest.raises(DegenerateMultipointError):
        admissible_point(parse("x - 1"), MultipointSet(Dyadic(1), Dyadic(0), 1))


@given(sparse_polys(max_degree=40), st.integers(-(2**20), 2**20), st.integers(-20, 0),
       st.integers(1, 40), st.integers(1, 6))
@settings(max_examples=60)
def test_admissible_property(p, m, e, d, k):
    M = MultipointSet(Dyadic(m, e), Dyadic(1, -d), k)
    if all(eval_exact(p, x).is_zero() for x in M.points()):
        return
    m_star, t = admissible_point(p, M)
    _check_admissible(p, M, m_star, t)


# bounds ---------------------------------------------------------------------------

def test_eval_sep_bound_examples():
    assert eval_sep_bound(2, 1).L == 768
    assert eval_sep_bound(50, 2).L == 51200
    assert eval_sep_bound(1, 1).L == 256


def test_chain_bound_examples():
    assert chain_bound(50, 2, 6).L == 281600
    n, tau = 37, 5
    assert chain_bound(n, tau, 1).L == 128 * n * (tau + 2 * 6)
    assert chain_bound(1, 3, 4).L == 128 * (3 + 5)


def test_bound_overflow():
    with pytest.raises(BoundOverflowError):
        chain_bound(2**60, 8, 4)
    with pytest.raises(BoundOverflowError):
        eval_sep_bound(2**60, 1)


def test_boundset_thresholds():
    B = BoundSet(1001)
    assert (B.zero_threshold_exp, B.nonzero_threshold_exp, B.decision_error_exp) == (-1001, -250, -500)
    assert B.zero_threshold_exp < B.decision_error_exp < B.nonzero_threshold_exp
    with pytest.raises(ValueError):
        BoundSet(127)


@given(sparse_polys())
@settings(max_examples=150)
def test_chain_bound_dominates_pairwise_bound(p):
    q, _ = strip_power(p)
    if q.k < 2:
        return
    L = chain_bound(q.degree, q.coeff_bits(), q.k).L
    chain = derivative_chain(q)
    for f, g in zip(chain, chain[1:]):
        mu = max(f.coeff_bits(), g.coeff_bits())
        assert L >= eval_sep_bound(f.degree, mu).L


def test_interval_sign():
    p = parse("x^2 - 2")
    assert interval_sign(p, Dyadic(3, -1), Dyadic(2)) == 1
    assert interval_sign(p, Dyadic(0), Dyadic(1)) == -1
    assert interval_sign(p, Dyadic(1), Dyadic(2)) == 0
    assert interval_sign(SparsePolynomial([(0, -3)]), Dyadic(-5), Dyadic(5)) == -1
