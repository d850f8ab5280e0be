#!/usr/bin/env python3
"""
Test the Wick oracle on Gaussian words and partition moments
"""

import sys
from pathlib import Path

import numpy as np
import pytest

# Add project root to Python path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from utils.errors import BadInputError, CapExceededError
from utils.partitions import SetPartition, enumerate_partitions
from utils.tracepoly import TracePolynomial
from utils.wick import (Fixed, GaussianWord, Matrix, Occ, moment_class, moment_H, moment_numeric, moment_partition,
                        pairings, rank_one_reduction, word_expectation)

P_TEST = np.array([[1.5, 0.4, 0.0], [0.4, 1.0, -0.2], [0.0, -0.2, 0.8]])
H2 = TracePolynomial.P(2) + TracePolynomial.tr(1).mul_P()


def test_single_occurrence_is_covariance():
    assert moment_partition(SetPartition.from_blocks([[1]]), centered=False) == TracePolynomial.P()
    assert moment_partition(SetPartition.from_blocks([[1]]), centered=True) == TracePolynomial.zero()


def test_independent_factors_multiply():
    p = SetPartition.from_blocks([[1], [2], [3]])
    assert moment_partition(p, centered=False) == TracePolynomial.P(3)
    assert moment_partition(p, centered=True) == TracePolynomial.zero()


def test_repeated_label():
    """E[(xx')^2] = 2P^2 + Tr(P) P"""
    word = GaussianWord((Occ(1), Occ(1)))
    assert word_expectation(word) == 2 * TracePolynomial.P(2) + TracePolynomial.tr(1).mul_P()
    assert moment_partition(SetPartition.from_blocks([[1, 2]]), centered=True) == H2


def test_pairing_counts():
    """A label repeated k times has (2k-1)!! same-label matchings"""
    assert len(list(pairings(GaussianWord((Occ(1),) * 3)))) == 15
    assert len(list(pairings(GaussianWord((Occ(1), Occ(2), Occ(1), Occ(2)))))) == 9
    with pytest.raises(BadInputError):
        GaussianWord((Occ(0),))


def test_fixed_powers_shift_the_chain():
    word = GaussianWord((Fixed(1), Occ(1), Fixed(2)))
    assert word_expectation(word) == TracePolynomial.P(4)


def test_symbolic_matches_numeric():
    for n in range(1, 4):
        for p in enumerate_partitions(n):
            for centered in (False, True):
                symbolic = moment_partition(p, centered).eval_numeric(P_TEST)
                numeric = moment_numeric(p, [np.eye(3)] * n, centered, P_TEST)
                assert np.allclose(symbolic, numeric, rtol=1e-10, atol=1e-10)


def test_numeric_word_with_matrices():
    """E[x x' A x x'] = P A P + P A' P + Tr(PA) P"""
    A = np.array([[0.0, 1.0, 0.0], [2.0, 0.0, 0.5], [0.0, 0.0, 1.0]])
    word = GaussianWord((Occ(1), Matrix(A), Occ(1)))
    expected = P_TEST @ A @ P_TEST + P_TEST @ A.T @ P_TEST + np.trace(P_TEST @ A) * P_TEST
    assert np.allclose(word_expectation(word, P_TEST), expected)


def test_moment_class_pairs():
    assert moment_class(2, 1, 'Q_ALL', centered=True) == H2
    assert moment_class(3, 1, 'NC', centered=False) == moment_partition(SetPartition.from_blocks([[1, 2, 3]]), False)
    with pytest.raises(BadInputError):
        moment_class(2, 1, 'Q_SOME', centered=True)


def test_gaussian_limit_moments():
    assert moment_H(0) == TracePolynomial.one()
    assert moment_H(2) == H2
    assert moment_H(3) == TracePolynomial.zero()
    assert moment_H(4) == moment_class(4, 2, 'Q_ALL', centered=True)
    with pytest.raises(CapExceededError):
        moment_H(10)
    with pytest.raises(BadInputError):
        moment_H(-2)


def test_caps():
    with pytest.raises(CapExceededError):
        moment_partition(SetPartition.from_blocks([range(1, 7)]), centered=True)
    with pytest.raises(CapExceededError):
        moment_partition(SetPartition.from_blocks([range(1, 8)]), centered=False)
    # an explicit cap lifts the configured one
    raised = moment_partition(SetPartition.from_blocks([[1, 2, 3], [4, 5, 6]]), centered=True, cap=12)
    block = moment_partition(SetPartition.from_blocks([[1, 2, 3]]), centered=True)
    assert raised == block * block


def test_rank_one_reduction():
    S = np.array([[1.0, 0.3], [0.3, 2.0]])
    A = np.array([[0.0, 1.0], [-1.0, 0.5]])
    whole = lambda n: SetPartition.from_blocks([range(1, n + 1)])
    assert np.allclose(rank_one_reduction([A]), moment_numeric(whole(2), [np.eye(2), A], False, np.eye(2)))
    assert np.allclose(rank_one_reduction([S, S]), moment_numeric(whole(3), [np.eye(2), S, S], False, np.eye(2)))


if __name__ == "__main__":
    print("Running tests...")
    test_repeated_label()
    test_symbolic_matches_numeric()
    print("\nAll tests passed!")
