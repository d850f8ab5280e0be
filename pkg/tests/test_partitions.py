#!/usr/bin/env python3
"""
Test set partition enumeration, crossing tests and the Kreweras complement
"""

import sys
from pathlib import Path

import pytest

# Add project root to Python path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from utils.errors import BadInputError, CapExceededError
from utils.partitions import (SetPartition, PartitionType, alpha, closure, count_partitions, enumerate_partitions,
                              from_alpha, integer_partitions, iota, is_crossing, kreweras, kreweras_bruteforce,
                              nc_of_type, oplus, partition_type)
from utils.specnum import bell_number, catalan, kreweras_count, narayana, riordan_nm, stirling2


def test_counts_match_counting_sequences():
    """Class sizes agree with Bell, Stirling, Catalan, Narayana and Riordan numbers"""
    for n in range(0, 8):
        assert count_partitions(n) == bell_number(n)
        assert count_partitions(n, None, 'NC') == catalan(n)
        for m in range(0, n + 1):
            assert count_partitions(n, m) == stirling2(n, m)
            assert count_partitions(n, m, 'NC') == narayana(n, m)
            assert count_partitions(n, m, 'NOSING_NC') == riordan_nm(n, m)


def test_class_split():
    """Pair-free partitions split into non-crossing and crossing ones"""
    for n in range(1, 7):
        total = count_partitions(n, None, 'NOSING')
        assert total == count_partitions(n, None, 'NOSING_NC') + count_partitions(n, None, 'NOSING_CROSS')
        assert count_partitions(n) == count_partitions(n, None, 'NC') + count_partitions(n, None, 'CROSS')


def test_recursion_agrees_with_filter():
    for n in range(0, 7):
        for m in range(0, n + 1):
            assert list(enumerate_partitions(n, m, 'NC', method='check')) == \
                list(enumerate_partitions(n, m, 'NC', method='filter'))


def test_lexicographic_alpha_order():
    labels = [alpha(p) for p in enumerate_partitions(5)]
    assert labels == sorted(labels)
    nc_labels = [alpha(p) for p in enumerate_partitions(5, None, 'NC')]
    assert nc_labels == sorted(nc_labels)


def test_crossing():
    assert is_crossing(SetPartition.from_blocks([[1, 3], [2, 4]]))
    assert not is_crossing(SetPartition.from_blocks([[1, 4], [2, 3]]))
    assert not is_crossing(SetPartition.from_blocks([[1, 2], [3, 4]]))
    assert is_crossing(SetPartition.from_blocks([[1, 3, 5], [2, 6], [4]]))


def test_canonical_blocks():
    p = SetPartition.from_blocks([[4, 2], [3], [1]])
    assert p.blocks == ((1,), (2, 4), (3,))
    assert str(p) == "{1}{2,4}{3}"
    assert alpha(p) == (1, 2, 3, 2)
    assert from_alpha(alpha(p)) == p


def test_invalid_blocks_rejected():
    with pytest.raises(BadInputError):
        SetPartition.from_blocks([[1, 2], [2, 3]])
    with pytest.raises(BadInputError):
        SetPartition.from_blocks([[1], [3]])


def test_iota_and_closure():
    assert iota(SetPartition.from_blocks([[1, 4], [2, 3]])) == 1
    assert iota(SetPartition.from_blocks([[1], [2], [3]])) == 3
    assert iota(SetPartition.from_blocks([[1, 2], [3, 5], [4]])) == 2
    assert closure(SetPartition.from_blocks([[1], [2]])) == SetPartition.from_blocks([[1, 3], [2]])
    assert closure(SetPartition.null()) == SetPartition.from_blocks([[1]])
    # every closure has a single outermost block
    for p in enumerate_partitions(4, None, 'NC'):
        assert iota(closure(p)) == 1


def test_oplus_concatenates():
    p = SetPartition.from_blocks([[1, 2]])
    q = SetPartition.from_blocks([[1], [2, 3]])
    assert oplus(p, q) == SetPartition.from_blocks([[1, 2], [3], [4, 5]])


def test_crossing_operations_rejected():
    crossing = SetPartition.from_blocks([[1, 3], [2, 4]])
    with pytest.raises(BadInputError):
        kreweras(crossing)
    with pytest.raises(BadInputError):
        iota(crossing)


def test_kreweras_extremes():
    for n in range(1, 7):
        whole = SetPartition.from_blocks([range(1, n + 1)])
        singletons = SetPartition.from_blocks([[i] for i in range(1, n + 1)])
        assert kreweras(whole) == singletons
        assert kreweras(singletons) == whole


def test_kreweras_agrees_with_bruteforce():
    for n in range(1, 7):
        for p in enumerate_partitions(n, None, 'NC'):
            k = kreweras(p)
            assert k == kreweras_bruteforce(p)
            assert k.m == n + 1 - p.m
            assert not is_crossing(k)


def test_nc_of_type_counts():
    for n in range(1, 8):
        for mu in integer_partitions(n):
            assert len(nc_of_type(n, mu)) == kreweras_count(mu)


def test_integer_partitions():
    types = list(integer_partitions(4))
    assert len(types) == 5
    assert types[0] == PartitionType.from_counts({4: 1})
    assert [mu.counts() for mu in integer_partitions(4, 2)] == [{1: 1, 3: 1}, {2: 2}]
    assert partition_type(SetPartition.from_blocks([[1, 2], [3], [4]])).counts() == {1: 2, 2: 1}


def test_bad_class_and_cap():
    with pytest.raises(BadInputError):
        enumerate_partitions(3, None, 'SOMETIMES')
    with pytest.raises(BadInputError):
        enumerate_partitions(3, 5)
    with pytest.raises(CapExceededError):
        enumerate_partitions(15)


if __name__ == "__main__":
    print("Running tests...")
    test_counts_match_counting_sequences()
    test_kreweras_agrees_with_bruteforce()
    print("\nAll tests passed!")
