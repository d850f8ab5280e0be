#!/usr/bin/env python3
"""
Test the moment recursions, closed forms and isotropic values
"""

import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

# Add project root to Python path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from pipelines.moments import (MomentTables, alpha_coeffs, alpha_convolution, alpha_direct, hn_moment, inversion,
                               isotropic, m_circ_nm, m_nm, m_plus, norm_estimates, pn_moment, pn_moment_iso,
                               pn_trace_iso, rank1_power, series_at, series_numeric, series_pretty, sigma,
                               sigma_circ, sigma_trace, x_minus_i_power, x_power_iso)
from utils.errors import BadInputError, CapExceededError
from utils.partitions import SetPartition, enumerate_partitions
from utils.specnum import catalan, narayana
from utils.tracepoly import RLaurent, TracePolynomial
from utils.wick import moment_H, moment_partition
from pipelines.verify import GOLDEN

GOLDEN_DIR = project_root / 'tests' / 'golden'
H2 = TracePolynomial.P(2) + TracePolynomial.tr(1).mul_P()
r = RLaurent.r()


def golden(name: str) -> str:
    return (GOLDEN_DIR / name).read_text(encoding='utf-8').strip()


def test_golden_polynomials():
    assert moment_H(2).to_json() == golden('h2.json')
    assert moment_H(4).to_json() == golden('h4.json')
    assert sigma_circ(3, 2).to_json() == golden('sigma_circ_3_2.json')
    assert rank1_power(3).to_json() == golden('rank1_power_3.json')
    assert (m_nm(4, 1) - m_nm(4, 2)).to_json() == golden('fourth_moment_gap.json')
    pi3 = SetPartition.from_blocks([[1, 3], [2, 4]])
    assert moment_partition(pi3, centered=True).to_json() == golden('m_pi3.json')


@pytest.mark.parametrize('n', [2, 3, 4])
def test_golden_centered_powers(n):
    assert m_nm(n, 1).to_json() == golden(f'x_minus_p_{n}.json')


@pytest.mark.parametrize('n', [1, 2, 3])
def test_golden_m_plus(n):
    assert m_plus(n).to_json() == golden(f'm_plus_{n}.json')


@pytest.mark.parametrize('n', [1, 2, 3, 4, 5])
def test_golden_sigma(n):
    assert sigma(n).to_json() == golden(f'sigma_{n}.json')
    assert sigma_trace(n)[0].to_json() == golden(f'sigma_trace_{n}.json')


def test_golden_files_are_all_checked():
    on_disk = {path.name for path in GOLDEN_DIR.glob('*.json')}
    assert on_disk == set(GOLDEN)


def test_fourth_order_moments():
    tr = TracePolynomial.tr
    P = TracePolynomial.P
    # E((X - P)^4)
    expected = (25 * P(4) + 15 * tr(1).mul_P(3) + (4 * tr(1) * tr(1) + 6 * tr(2)).mul_P(2)
                + (tr(1) * tr(1) * tr(1) + 4 * tr(1) * tr(2) + 5 * tr(3)).mul_P())
    assert m_nm(4, 1) == expected
    # Gamma(Gamma(I)) + Gamma(I)^2 carries Tr(P)^2 P^2, not Tr(P^2) P^2
    assert m_plus(2).coefficient({1: 2}, 2) == 1
    assert m_plus(2).coefficient({2: 1}, 2) == 0
    assert m_plus(2).eval_isotropic() == 2 * (1 + r) ** 2


def test_sigma_trace_five():
    total, table = sigma_trace(5)
    assert [row['coefficient'] for row in table] == [5, 20, 10, 5, 2]
    assert total == sigma(5).trace()


def test_sigma_routes_agree():
    for n in range(0, 7):
        assert sigma(n) == sigma(n, 'CLOSED_FORM')
    for n in range(1, 7):
        assert sigma(n).trace() == sigma_trace(n)[0]
    assert sigma(1) == TracePolynomial.tr(1).mul_P()


def test_sigma_trace_table():
    total, table = sigma_trace(2)
    # mu with three parts summing to weight 4: (1,1,2) only
    assert table == [{'mu': {1: 2, 2: 1}, 'coefficient': Fraction(2)}]
    assert total == 2 * TracePolynomial.monomial(1, {1: 2, 2: 1}, 0)


def test_sigma_circ_routes_agree():
    for n in range(0, 6):
        for m in range(0, n + 1):
            assert sigma_circ(n, m) == sigma_circ(n, m, 'CLOSED_FORM')
    assert sigma_circ(2, 1) == TracePolynomial.tr(1).mul_P()
    assert sigma_circ(3, 0) == TracePolynomial.zero()


def test_sigma_isotropic_leading_terms():
    for n in range(1, 7):
        assert sigma(n).trace().eval_isotropic() == catalan(n) * r ** (n + 1)
        for m in range(1, n + 1):
            assert sigma_circ(n, m).trace().eval_isotropic() == narayana(n, m) * r ** (n - m + 1)


def test_m_plus_routes_and_classes():
    for n in range(0, 6):
        assert m_plus(n) == m_plus(n, 'GAMMA')
        assert m_plus(n).eval_isotropic() == catalan(n) * (1 + r) ** n
    for n in (1, 2):
        assert m_plus(n) == m_plus(n, 'WICK')
    # centered words of length 6 are past the default Wick cap
    assert m_plus(3) == m_plus(3, 'WICK', cap=12)
    for n in range(1, 6):
        assert (m_plus(n) - sigma(n)).class_check(2 * n, n - 1)
    with pytest.raises(BadInputError):
        m_plus(2, 'SHORTCUT')
    with pytest.raises(CapExceededError):
        m_plus(9)


def test_pair_partitions_give_gaussian_moments():
    for n in (1, 2):
        assert m_nm(2 * n, n) == moment_H(2 * n)
    assert m_nm(2, 1) == H2
    assert m_nm(3, 2) == TracePolynomial.zero()


def test_inversion_matches_class_sum():
    for n in range(1, 4):
        for m in range(1, n + 1):
            assert inversion(n, m) == m_nm(n, m)
    with pytest.raises(BadInputError):
        inversion(3, 0)


def test_finite_n_second_moments():
    """E(P_N^2) = P^2 + (P^2 + Tr(P) P)/N and E(H_N^2) = E(H^2)"""
    assert hn_moment(2) == {Fraction(0): H2}
    series = pn_moment(2)
    assert series == {Fraction(0): TracePolynomial.P(2), Fraction(-1): H2}
    assert pn_moment(2, centered=True) == {Fraction(-1): H2}
    assert pn_moment(1) == {Fraction(0): TracePolynomial.P()}
    assert pn_moment(0) == {Fraction(0): TracePolynomial.one()}
    assert series_at(series, 4) == TracePolynomial.P(2) + Fraction(1, 4) * H2


def test_finite_n_third_moment_half_powers():
    # only the single-block partition of [3] is pair-free
    series = hn_moment(3)
    assert series == {Fraction(-1, 2): m_nm(3, 1)}
    with pytest.raises(BadInputError):
        series_at(series, 2)
    assert series_at(series, 4) == Fraction(1, 2) * m_nm(3, 1)
    assert series_pretty(series).startswith("N^(-1/2) * [")


def test_series_numeric_matches_exact():
    P = np.array([[1.0, 0.2], [0.2, 0.5]])
    series = pn_moment(3)
    exact = series_at(series, 9).eval_numeric(P)
    assert np.allclose(series_numeric(series, 9, P), exact)


def test_binomial_convention_differs():
    assert pn_moment(2, convention='binomial') != pn_moment(2)
    with pytest.raises(BadInputError):
        pn_moment(2, convention='rising')


def test_uncentered_classes():
    assert m_circ_nm(2, 1) == 2 * TracePolynomial.P(2) + TracePolynomial.tr(1).mul_P()
    assert m_circ_nm(2, 2) == TracePolynomial.P(2)


def test_rank1_power():
    for n in range(1, 6):
        assert rank1_power(n) == moment_partition(SetPartition.from_blocks([range(1, n + 1)]), centered=False)
        assert rank1_power(n).eval_isotropic() == x_power_iso(n)
    with pytest.raises(BadInputError):
        rank1_power(0)


def test_x_minus_i_power():
    assert x_minus_i_power(0) == RLaurent.one()
    assert x_minus_i_power(1) == RLaurent()
    assert x_minus_i_power(2) == r + 1
    for n in range(0, 7):
        assert x_minus_i_power(n) == x_minus_i_power(n, 'BINOMIAL')
    with pytest.raises(BadInputError):
        x_minus_i_power(2, 'SERIES')


def test_isotropic_factorization():
    for n in range(1, 5):
        for p in enumerate_partitions(n, None, 'NC'):
            assert moment_partition(p, centered=False).eval_isotropic() == isotropic('M_PI_CIRC', {'partition': p})
            assert moment_partition(p, centered=True).eval_isotropic() == \
                isotropic('M_PI_CENTERED', {'partition': p})
    assert isotropic('M_PI_CENTERED', {'partition': [[1, 2], [3, 4]]}) == (r + 1) ** 2
    assert isotropic('M_PI_CENTERED', {'partition': json.dumps([[1], [2, 3]])}) == RLaurent()
    assert isotropic('M_PLUS_I', {'n': 3}) == 5 * (1 + r) ** 3
    with pytest.raises(BadInputError):
        isotropic('M_PI_CIRC', {'partition': [[1, 3], [2, 4]]})
    with pytest.raises(BadInputError):
        isotropic('M_PI_CIRC', {})


def test_isotropic_finite_n():
    assert pn_trace_iso(1, Fraction(1, 2)) == RLaurent.one()
    assert pn_trace_iso(2, Fraction(1)) == 2 + r ** -1
    assert pn_moment_iso(2) == {Fraction(0): RLaurent.one(), Fraction(-1): 1 + r}
    with pytest.raises(BadInputError):
        pn_trace_iso(2, Fraction(0))


def test_alpha_coefficients():
    table = alpha_coeffs(5, [1] * 7)
    for n in range(1, 6):
        assert table[(n, 1)] == catalan(n - 1)
        assert sum(table[(n, m)] for m in range(0, n + 1)) == catalan(n)
    u = [Fraction(1), Fraction(2), Fraction(1, 3), Fraction(5), Fraction(1), Fraction(7)]
    assert alpha_direct(4, u) == alpha_convolution(4, u)
    with pytest.raises(CapExceededError):
        alpha_coeffs(10, [1] * 12)
    with pytest.raises(BadInputError):
        alpha_coeffs(3, [1, 0, 1, 1, 1])


def test_norm_estimates():
    result = norm_estimates(np.diag([1.0, 2.0]), 2, 1)
    assert result['holds']
    assert result['norm'] <= result['bound']


def test_moment_tables(tmp_path):
    stats = MomentTables(n_max=3, output_dir=str(tmp_path)).generate()
    assert stats['sigma_rows'] > 0
    assert (tmp_path / 'alpha_catalan.csv').exists()
    assert json.loads((tmp_path / 'moment_tables_stats.json').read_text())['n_max'] == 3


if __name__ == "__main__":
    print("Running tests...")
    test_sigma_routes_agree()
    test_finite_n_second_moments()
    print("\nAll tests passed!")
