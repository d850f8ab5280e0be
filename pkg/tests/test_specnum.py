#!/usr/bin/env python3
"""
Test the counting sequences against sympy and the Bell polynomial helpers
"""

import sys
from fractions import Fraction
from math import factorial
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy import bell, binomial
from sympy import catalan as sympy_catalan
from sympy.functions.combinatorial.numbers import stirling

# Add project root to Python path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from utils.errors import BadInputError, HypothesisError
from utils.partitions import enumerate_partitions
from utils.specnum import (bell_complete, bell_inverse, bell_number, bell_partial, binom, catalan, catalan_triangle,
                           catalan_triangle_convolution, central_binomial_check, count,
                           falling_factorial_coefficients, gauss_even, kreweras_count, bell_tail_check, narayana,
                           parse_type, pochhammer, riordan_n, riordan_nm, stirling1, stirling2)


def test_stirling_against_sympy():
    for n in range(0, 10):
        for m in range(0, n + 1):
            assert stirling1(n, m) == int(stirling(n, m, kind=1, signed=True))
            assert stirling2(n, m) == int(stirling(n, m, kind=2))


def test_bell_and_catalan_against_sympy():
    for n in range(0, 12):
        assert bell_number(n) == int(bell(n))
        assert catalan(n) == int(sympy_catalan(n))


def test_narayana_sums():
    for n in range(1, 10):
        assert sum(narayana(n, m) for m in range(n + 1)) == catalan(n)
        assert narayana(n, 1) == 1
        assert narayana(n, n) == 1
    assert narayana(4, 2) == 6


def test_riordan():
    assert riordan_nm(4, 2) == 2
    assert [riordan_n(n) for n in range(1, 8)] == [0, 1, 1, 3, 6, 15, 36]


def test_catalan_triangle():
    for n in range(1, 9):
        assert sum(catalan_triangle(n, m) for m in range(1, n + 1)) == catalan(n)
        for m in range(1, n + 1):
            assert catalan_triangle(n, m) == catalan_triangle_convolution(n, m)
            assert catalan_triangle(n, m) * n == m * int(binomial(2 * n - m - 1, n - 1))


def test_catalan_triangle_first_block_form():
    # m/n C(2n-m-1, n-1) counts by first-block size; m/n C(2n, n-m) overcounts (n=2 gives 3)
    for n in range(1, 8):
        by_first_block = [0] * (n + 1)
        for p in enumerate_partitions(n, None, 'NC'):
            by_first_block[len(p.blocks[0])] += 1
        assert by_first_block[1:] == [catalan_triangle(n, m) for m in range(1, n + 1)]
        assert [catalan_triangle(n, m) for m in range(1, n + 1)] == \
            [catalan_triangle_convolution(n, m) for m in range(1, n + 1)]
        assert sum(catalan_triangle(n, m) for m in range(1, n + 1)) == catalan(n)
    assert sum(Fraction(m, 2) * binom(4, 2 - m) for m in (1, 2)) == 3


def test_kreweras_count_and_parse():
    assert kreweras_count(parse_type(['2:2'])) == 2
    assert kreweras_count(parse_type(['1:4'])) == 1
    assert count('KREWERAS', ['1:1', '2:1']) == 3
    assert count('catalan', [5]) == 42


def test_pochhammer_and_gauss():
    assert pochhammer(5, 3) == 60
    assert pochhammer(Fraction(1, 2), 2) == Fraction(-1, 4)
    assert [gauss_even(n) for n in range(5)] == [1, 1, 3, 15, 105]
    assert falling_factorial_coefficients(3) == {3: 1, 2: -3, 1: 2}


def test_count_errors():
    with pytest.raises(BadInputError):
        count('FIBONACCI', [3])
    with pytest.raises(BadInputError):
        count('NARAYANA', [3])
    with pytest.raises(BadInputError):
        stirling1(-1, 0)


def test_bell_complete():
    ones = [Fraction(1)] * 8
    assert [bell_complete(n, ones) for n in range(8)] == [bell_number(n) for n in range(8)]
    # x_1 = x_2 = 1 counts involutions
    involution = [Fraction(1), Fraction(1)] + [Fraction(0)] * 6
    assert [bell_complete(n, involution) for n in range(1, 6)] == [1, 2, 4, 10, 26]


def test_bell_partial():
    x = [Fraction(i) for i in range(1, 7)]
    assert bell_partial(1, 4, x) == x[3]
    assert bell_partial(4, 4, x) == x[0] ** 4
    assert sum(bell_partial(k, 5, x) for k in range(1, 6)) == bell_complete(5, x)


def test_bell_inverse():
    x = [Fraction(2), Fraction(-1, 3), Fraction(5), Fraction(0), Fraction(7, 2)]
    y = [bell_complete(k, x) for k in range(1, len(x) + 1)]
    assert bell_inverse(y) == x


def test_bell_tail_pair_sequence():
    """x = (0, 1, 0, ...) makes the leading term exact"""
    x = [Fraction(0), Fraction(1)] + [Fraction(0)] * 5
    assert bell_tail_check(2, Fraction(1), Fraction(1), x, 3, 1)
    assert bell_tail_check(2, Fraction(1), Fraction(1), x, 2, 0)


def test_bell_tail_hypotheses():
    x = [Fraction(1), Fraction(1)] + [Fraction(0)] * 5
    with pytest.raises(HypothesisError):
        bell_tail_check(2, Fraction(1), Fraction(1), x, 3, 1)
    with pytest.raises(HypothesisError):
        bell_tail_check(2, Fraction(1), Fraction(1), [Fraction(0)] * 7, 3, 2)


@given(data=st.data())
@settings(max_examples=60, deadline=None)
def test_bell_tail_random_sequences(data):
    p = data.draw(st.integers(1, 3))
    n = data.draw(st.integers(1, 3))
    q = data.draw(st.integers(0, p - 1))
    x = [Fraction(0)] * (p - 1)
    for k in range(p, p * n + q + 1):
        bound = factorial(k)
        x.append(Fraction(data.draw(st.integers(-bound, bound)), data.draw(st.integers(1, 3))))
    assert bell_tail_check(p, Fraction(1), Fraction(1), x, n, q)


def test_central_binomial():
    for n in range(1, 30):
        assert central_binomial_check(n)


if __name__ == "__main__":
    print("Running tests...")
    test_stirling_against_sympy()
    test_bell_complete()
    print("\nAll tests passed!")
