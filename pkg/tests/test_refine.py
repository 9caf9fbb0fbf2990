from fractions import Fraction

import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from conftest import brackets_sqrt, golden
from sparseroots import ContractError, Dyadic, derivative_chain, parse
from sparseroots.numeric import certified_sign
from sparseroots.oracle import densify, sturm_isolate
from sparseroots.refine import (
    RefineState,
    bisect_step,
    boundary_test,
    newton_test,
    refine_all,
    refine_root,
)
from sparseroots.stats import Stats

from test_poly import sparse_polys

X2M2 = parse("x^2 - 2")


def _d(q) -> Dyadic:
    return Dyadic.from_fraction(Fraction(q))


def _state(p, a, b, N=4):
    s = RefineState.start(p, _d(a), _d(b))
    return RefineState(s.a, s.b, N, s.sign_a, s.sign_b)


def test_state_validation():
    with pytest.raises(ContractError):
        RefineState(Dyadic(2), Dyadic(1), 4, -1, 1)
    with pytest.raises(ContractError):
        RefineState(Dyadic(1), Dyadic(2), 4, 1, 1)
    with pytest.raises(ContractError):
        RefineState(Dyadic(1), Dyadic(2), 8, -1, 1)
    with pytest.raises(ContractError):
        RefineState(Dyadic(1), Dyadic(1), 4, -1, 1)
    assert RefineState(Dyadic(1), Dyadic(2), 2**16, -1, 1).log2_N == 16
    assert RefineState.point(Dyadic(3)).is_point


# newton test ------------------------------------------------------------------

def test_newton_on_sqrt2():
    s = _state(X2M2, 1, 2)
    new = newton_test(X2M2, s)
    assert new is not None
    assert brackets_sqrt(new.a, new.b)
    assert new.width <= Dyadic(1, -2)
    assert new.width * 32 >= s.width
    assert new.N == 16


def test_newton_fails_on_root_outside_middle():
    # steep polynomial, root close to the left end: the quotients at the sample
    # points are far larger than the interval, so every pair is discarded
    p = parse("x^64 - 2")
    s = _state(p, 1, 2)
    assert newton_test(p, s) is None


@given(st.integers(2, 40), st.integers(1, 2**10))
@settings(max_examples=40)
def test_newton_success_contract(n, c):
    p = parse(f"x^{n} - {c}")
    hi = 2
    while hi**n <= c:
        hi *= 2
    s = _state(p, 0, hi)
    new = newton_test(p, s)
    if new is None or new.is_point:
        return
    w, N = s.width, s.N
    assert s.contains(new)
    assert new.width * N <= w <= new.width * 8 * N
    assert new.sign_a == s.sign_a and new.sign_b == s.sign_b
    assert new.N == N * N


# boundary test ----------------------------------------------------------------

def test_boundary_left_fires():
    s = _state(X2M2, Fraction(11, 8), 3)
    new = boundary_test(X2M2, s)
    assert new is not None
    assert new.a == s.a
    assert brackets_sqrt(new.a, new.b)
    assert new.width * 4 <= s.width <= new.width * 16
    assert new.N == 16


def test_boundary_fails_for_central_root():
    p = parse("2x - 3")
    assert boundary_test(p, _state(p, 1, 2)) is None


# bisection --------------------------------------------------------------------

def test_bisect_sqrt2():
    s = _state(X2M2, 1, 2)
    new = bisect_step(X2M2, s)
    assert brackets_sqrt(new.a, new.b)
    assert new.width * 4 < s.width * 3


def test_bisect_speed_drop():
    s = _state(X2M2, 1, 2, N=256)
    assert bisect_step(X2M2, s).N == 16
    assert bisect_step(X2M2, _state(X2M2, 1, 2, N=16)).N == 4
    assert bisect_step(X2M2, _state(X2M2, 1, 2, N=4)).N == 4


def test_bisect_degenerate_multipoint_returns_center():
    # x^3 - x vanishes on all of -1, 0, 1; the spacing here is 16/16 = 1
    p = parse("x^3 - x")
    s = _state(p, -8, 8)
    assert bisect_step(p, s) == RefineState.point(Dyadic(0))


def test_bisect_exact_root_hit():
    p = parse("x^2 - 1")
    new = bisect_step(p, _state(p, 0, 2))
    if new.is_point:
        assert new.a == 1
    else:
        assert new.a < 1 < new.b


# refine_root ------------------------------------------------------------------

def test_refine_sqrt2_to_10_bits():
    stats = Stats()
    s = refine_root(X2M2, _state(X2M2, 1, 2), 10, stats)
    assert s.width < Dyadic.pow2(-10)
    assert brackets_sqrt(s.a, s.b)
    assert stats.refinement_iterations > 0


def test_refine_fourth_chain_poly_from_search_interval():
    p4 = derivative_chain(golden())[4]
    s = refine_root(p4, RefineState.start(p4, Dyadic(0), Dyadic(8)), 64)
    assert 1.326 < float(s.a) < 1.327
    # exact root is sqrt(777216 / 441600)
    lo, hi = s.a.to_fraction(), s.b.to_fraction()
    assert lo * lo * 441600 < 777216 < hi * hi * 441600


def test_refine_already_narrow_is_noop():
    s = RefineState(Dyadic(1414, -10), Dyadic(1415, -10), 4, -1, 1)
    stats = Stats()
    assert refine_root(parse("x^2 - 2048"), s, 5, stats) == s
    assert stats.refinement_iterations == 0


def test_refine_quadratic_regime_on_sqrt2():
    trace = []
    refine_root(X2M2, _state(X2M2, 1, 2), 2000, trace=trace)
    kinds = [t[0] for t in trace]
    assert "newton" in kinds
    # quadratic convergence: far fewer steps than bits
    assert len(trace) < 40
    for kind, w_old, w_new, N in trace:
        if kind != "bisect":
            assert w_new * N <= w_old


def test_refine_all_examples():
    assert refine_all(X2M2, [], 10) == []
    p3 = derivative_chain(golden())[3]
    states = [RefineState.start(p3, _d(a), _d(b))
              for a, b, _ in sturm_isolate(densify(p3)) if a > 0]
    out = refine_all(p3, states, 200)
    # the printed values are truncated to three decimals
    assert [int(1000 * s.a.to_fraction()) for s in out] == [1275, 1375]
    for s0, s in zip(states, out):
        assert s0.contains(s) and s.width < Dyadic.pow2(-200)
    assert out[0].b < out[1].a


@given(sparse_polys(max_terms=5, max_degree=40))
@settings(max_examples=40, suppress_health_check=[HealthCheck.too_slow], deadline=None)
def test_refine_keeps_oracle_root(p):
    dense = densify(p)
    for lo, hi, mult in sturm_isolate(dense):
        if lo == hi or mult != 1:
            continue
        a, b = Dyadic.from_fraction(lo), Dyadic.from_fraction(hi)
        if certified_sign(p, a) * certified_sign(p, b) != -1:
            continue
        s = refine_root(p, RefineState.start(p, a, b), 48)
        if s.is_point:
            assert p(s.a) == 0
            continue
        assert s.width < Dyadic.pow2(-48)
        assert lo <= s.a.to_fraction() and s.b.to_fraction() <= hi
        assert p(s.a).sign() * p(s.b).sign() == -1
