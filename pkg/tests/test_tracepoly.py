#!/usr/bin/env python3
"""
Test trace polynomial arithmetic, structural maps and serialization
"""

import sys
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

# Add project root to Python path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from utils.errors import BadInputError
from utils.tracepoly import RLaurent, TracePolynomial, arith, gamma_matrix, load_matrix

P_TEST = np.array([[2.0, 0.5, 0.1], [0.5, 1.0, 0.3], [0.1, 0.3, 0.7]])

monomials = st.builds(
    TracePolynomial.monomial,
    st.fractions(min_value=-5, max_value=5, max_denominator=6),
    st.dictionaries(st.integers(0, 3), st.integers(1, 2), max_size=2),
    st.integers(0, 3),
)
polynomials = st.lists(monomials, max_size=4).map(lambda ms: sum(ms, TracePolynomial.zero()))


@settings(max_examples=50, deadline=None)
@given(polynomials, polynomials, polynomials)
def test_ring_laws(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == TracePolynomial.zero()
    assert a * TracePolynomial.one() == a


@settings(max_examples=50, deadline=None)
@given(polynomials, polynomials)
def test_trace_is_linear(a, b):
    assert (a + b).trace() == a.trace() + b.trace()
    assert (3 * a).trace() == 3 * a.trace()
    assert a.trace().is_scalar()


@settings(max_examples=30, deadline=None)
@given(polynomials, polynomials)
def test_numeric_evaluation_is_a_homomorphism(a, b):
    left = (a * b).eval_numeric(P_TEST)
    right = a.eval_numeric(P_TEST) @ b.eval_numeric(P_TEST)
    assert np.allclose(left, right, rtol=1e-9, atol=1e-8)
    assert np.allclose(a.trace().eval_numeric(P_TEST), np.trace(a.eval_numeric(P_TEST)) * np.eye(3),
                       rtol=1e-9, atol=1e-8)


@settings(max_examples=30, deadline=None)
@given(polynomials)
def test_gamma_matches_matrix_form(a):
    Q = a.eval_numeric(P_TEST)
    for which in ('GAMMA', 'OMEGA', 'GAMMABAR', 'GAMMA_UNCENTERED'):
        assert np.allclose(a.gamma(which).eval_numeric(P_TEST), gamma_matrix(Q, P_TEST, which),
                           rtol=1e-9, atol=1e-8)


@settings(max_examples=50, deadline=None)
@given(polynomials)
def test_json_reads_back(a):
    assert TracePolynomial.from_json(a.to_json()) == a


def test_canonical_json_layout():
    h2 = TracePolynomial.P(2) + TracePolynomial.tr(1).mul_P()
    assert h2.to_json() == '{"terms":[{"c":"1/1","v":{},"w":2},{"c":"1/1","v":{"1":1},"w":1}]}'
    half = TracePolynomial.monomial(Fraction(-1, 2), {0: 1, 2: 3}, 0)
    assert half.to_json() == '{"terms":[{"c":"-1/2","v":{"0":1,"2":3},"w":0}]}'


def test_trace_introduces_dimension():
    a = TracePolynomial.one() + TracePolynomial.P()
    assert a.trace() == TracePolynomial.tr(0) + TracePolynomial.tr(1)
    assert a.trace().eval_isotropic() == RLaurent({1: 2})


def test_pretty():
    a = TracePolynomial.P() + TracePolynomial.tr(1)
    assert a.pretty() == "P + Tr(P)"
    b = TracePolynomial.monomial(-2, {2: 2}, 3) + TracePolynomial.scalar(1)
    assert b.pretty() == "-2 Tr(P^2)^2 P^3 + I"
    assert TracePolynomial.zero().pretty() == "0"


def test_divide_trace():
    a = TracePolynomial.monomial(3, {1: 2}, 1)
    assert a.divide_trace(1) == TracePolynomial.monomial(3, {1: 1}, 1)
    with pytest.raises(BadInputError):
        TracePolynomial.P().divide_trace(1)


def test_substitute_traces():
    a = TracePolynomial.monomial(2, {1: 1}, 2) + TracePolynomial.monomial(1, {2: 1}, 2) + TracePolynomial.P()
    assert a.substitute_traces({1: 3, 2: Fraction(1, 2)}) == {2: Fraction(13, 2), 1: 1}
    with pytest.raises(BadInputError):
        a.substitute_traces({1: 3})


def test_class_check():
    h2 = TracePolynomial.P(2) + TracePolynomial.tr(1).mul_P()
    assert h2.class_check(2, 1)
    assert not h2.class_check(1, 1)
    assert not h2.class_check(2, 1, strict=True)
    assert TracePolynomial.tr(1).mul_P().class_check(2, 1, strict=True)


def test_arith_dispatch():
    a = TracePolynomial.P()
    assert arith(a, a, 'mul') == TracePolynomial.P(2)
    assert arith(a, Fraction(1, 2), 'SCALE') == TracePolynomial.monomial(Fraction(1, 2), {}, 1)
    with pytest.raises(BadInputError):
        arith(a, a, 'DIV')
    with pytest.raises(BadInputError):
        a ** -1


def test_rlaurent():
    r = RLaurent.r()
    assert (r + 1) * (r - 1) == r ** 2 - 1
    assert (r ** 2 + 3).evaluate(2) == 7
    assert (2 * r) ** -1 == RLaurent({-1: Fraction(1, 2)})
    assert RLaurent({2: 1, 0: -3}).pretty() == "-3 + r²"
    assert (r + 1).to_json() == {"0": "1/1", "1": "1/1"}
    with pytest.raises(BadInputError):
        (r + 1) ** -1


def test_load_matrix():
    M = load_matrix('{"dim": 2, "rows": [[1, 0], [0, 2]]}')
    assert np.array_equal(M, np.diag([1.0, 2.0]))
    with pytest.raises(BadInputError):
        load_matrix({"dim": 3, "rows": [[1, 0], [0, 2]]})
    with pytest.raises(BadInputError):
        TracePolynomial.from_json('{"terms":[{"c":"1/1"}]}')


if __name__ == "__main__":
    print("Running tests...")
    test_canonical_json_layout()
    test_pretty()
    print("\nAll tests passed!")
