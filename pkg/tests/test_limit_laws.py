#!/usr/bin/env python3
"""
Test Marchenko-Pastur and semicircle limit moments
"""

import sys
from fractions import Fraction
from pathlib import Path

import pytest

# Add project root to Python path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from pipelines.limit_laws import (LimitLawComparison, limits, mp_centered_iso, mp_integral, mp_moment, mp_moment_iso,
                                  mp_moment_iso_binomial, sc_integral, sc_moment, semicircle_sigma)
from utils.errors import BadInputError, CapExceededError
from utils.specnum import catalan


def test_mp_at_unit_ratio_is_catalan():
    for n in range(0, 9):
        assert mp_moment_iso(n, 1) == catalan(n)


def test_mp_forms_agree():
    for rho in (Fraction(1, 2), Fraction(2), Fraction(3, 5)):
        for n in range(0, 8):
            assert mp_moment_iso(n, rho) == mp_moment_iso_binomial(n, rho)
            assert mp_moment(n, rho, [1] * max(n, 1)) == mp_moment_iso(n, rho)


def test_mp_general_traces():
    # rho tau_1^2 + tau_2
    assert mp_moment(2, Fraction(1, 2), [Fraction(2), Fraction(3)]) == 5
    assert mp_moment(1, Fraction(1, 2), [Fraction(7)]) == 7
    with pytest.raises(BadInputError):
        mp_moment(3, 1, [1, 1])


def test_mp_centered():
    rho = Fraction(1, 3)
    assert mp_centered_iso(1, rho) == 0
    assert mp_centered_iso(2, rho) == rho
    assert mp_centered_iso(3, rho) == rho ** 2


def test_semicircle():
    for n in range(0, 7):
        assert semicircle_sigma(n, [1] * max(n, 1)) == catalan(n)
    assert [sc_moment(n) for n in range(7)] == [1, 0, 1, 0, 2, 0, 5]


def test_quadrature_matches_combinatorics():
    for rho in (0.5, 1.0, 2.0):
        for n in range(0, 6):
            assert abs(mp_integral(n, rho) - float(mp_moment_iso(n, Fraction(rho)))) <= 1e-6
    for n in range(0, 9):
        assert abs(sc_integral(n) - sc_moment(n)) <= 1e-8


def test_dispatch():
    assert limits('mp_moment_iso', {'n': 4, 'rho': Fraction(1, 2)}) == Fraction(45, 8)
    assert limits('SEMICIRCLE_SIGMA', {'n': 2, 'tau': [1, 1]}) == 2
    with pytest.raises(BadInputError):
        limits('MP_MOMENT', {'n': 2, 'rho': 1})
    with pytest.raises(BadInputError):
        limits('WIGNER', {'n': 2})


def test_domain_errors():
    with pytest.raises(CapExceededError):
        mp_moment_iso(13, 1)
    with pytest.raises(BadInputError):
        mp_moment_iso(2, 0)
    with pytest.raises(BadInputError):
        mp_integral(2, -1.0)


def test_comparison_table(tmp_path):
    stats = LimitLawComparison(n_max=3, output_dir=str(tmp_path)).generate()
    assert stats['max_abs_error_mp'] < 1e-6
    assert stats['max_abs_error_sc'] < 1e-8
    assert (tmp_path / 'limit_moments.csv').exists()
