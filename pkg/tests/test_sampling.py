#!/usr/bin/env python3
"""
Test the Monte Carlo oracle: reproducible draws, estimates and spectra
"""

import sys
from pathlib import Path

import numpy as np
import pytest

# Add project root to Python path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from utils.errors import BadInputError
from utils.sampling import (RngSpec, box_muller, check_symmetric, cholesky_factor, eigen, eigenvalues,
                            empirical_moment, event_frequency, mp_bin_mass, random_spd, run_trials, sample_h,
                            sample_wishart, sc_bin_mass, spectral_histogram, sqrt_psd, trace_clt,
                            weyl_holds, wielandt_hoffman_holds)

P_TEST = np.array([[2.0, 0.3, 0.0], [0.3, 1.0, 0.2], [0.0, 0.2, 0.5]])


def test_substreams_are_reproducible():
    rng = RngSpec(7, 1)
    assert rng.generator(3).random() == RngSpec(7, 1).generator(3).random()
    assert rng.generator(3).random() != rng.generator(4).random()
    assert rng.generator(3).random() != RngSpec(7, 2).generator(3).random()
    assert rng.to_json() == {'algorithm': 'MT19937', 'seed': 7, 'stream': 1}
    with pytest.raises(BadInputError):
        RngSpec(-1, 0).generator(0)


def test_results_do_not_depend_on_workers():
    rng = RngSpec(11, 0)
    task = lambda gen: float(gen.standard_normal())
    assert run_trials(task, 50, rng, workers=1) == run_trials(task, 50, rng, workers=3)
    with pytest.raises(BadInputError):
        run_trials(task, 5, rng, workers=0)


def test_matrix_validation():
    with pytest.raises(BadInputError):
        check_symmetric(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(BadInputError):
        check_symmetric(np.ones(3))
    with pytest.raises(BadInputError):
        cholesky_factor(np.diag([1.0, -1.0]))
    root = sqrt_psd(P_TEST)
    assert np.allclose(root @ root, P_TEST)


def test_random_spd_spectrum():
    P = random_spd(3, RngSpec(1, 0).generator(0))
    assert np.allclose(np.sort(np.linalg.eigvalsh(P)), [1.0, 5.5, 10.0])
    assert box_muller(RngSpec(1, 0).generator(0), (3, 5)).shape == (3, 5)


def test_draws_are_symmetric():
    gen = RngSpec(3, 0).generator(0)
    for variant in ('PLAIN', 'MEAN_ADJUSTED'):
        W = sample_wishart(P_TEST, 10, variant, gen)
        assert np.allclose(W, W.T)
        assert np.min(np.linalg.eigvalsh(W)) >= -1e-12
    H = sample_h(P_TEST, gen)
    assert np.allclose(H, H.T)
    with pytest.raises(BadInputError):
        sample_wishart(P_TEST, 0, 'PLAIN', gen)
    with pytest.raises(BadInputError):
        sample_wishart(P_TEST, 5, 'SHRUNK', gen)


def test_empirical_mean_matches_covariance():
    estimate = empirical_moment(P_TEST, 20, 1, 'PN_POWER', 400, RngSpec(5, 0), workers=1)
    assert estimate.trials == 400
    assert estimate.within(P_TEST)
    assert estimate.to_json()['meta']['rng']['seed'] == 5


def test_empirical_moment_arguments():
    with pytest.raises(BadInputError):
        empirical_moment(P_TEST, 20, 1, 'PN_POWER', 50, workers=1)
    with pytest.raises(BadInputError):
        empirical_moment(P_TEST, 20, 1, 'TRACE', 200, workers=1)


def test_jacobi_matches_lapack():
    gen = RngSpec(9, 0).generator(0)
    for dim in (1, 2, 5, 8):
        B = gen.standard_normal((dim, dim))
        A = (B + B.T) / 2.0
        assert np.allclose(eigen(A), np.sort(np.linalg.eigvalsh(A))[::-1], atol=1e-9)
    values = eigenvalues(P_TEST)
    assert list(values) == sorted(values, reverse=True)


def test_perturbation_inequalities():
    gen = RngSpec(13, 0).generator(0)
    for _ in range(20):
        A = random_spd(4, gen)
        E = gen.standard_normal((4, 4))
        B = A + (E + E.T) / 4.0
        assert weyl_holds(A, B)
        assert wielandt_hoffman_holds(A, B)


def test_limit_densities_have_unit_mass():
    assert abs(mp_bin_mass(0.0, 10.0, 0.5) - 1.0) < 1e-6
    assert abs(mp_bin_mass(0.0, 10.0, 2.0) - 1.0) < 1e-6
    assert abs(sc_bin_mass(-3.0, 3.0) - 1.0) < 1e-6


def test_event_frequency():
    result = event_frequency(lambda gen: True, 1000, RngSpec(1, 0), workers=1)
    assert result.frequency == 1.0
    assert result.high == pytest.approx(1.0)
    assert result.low < 1.0
    with pytest.raises(BadInputError):
        event_frequency(lambda gen: True, 999, workers=1)


def test_trace_clt_reports():
    result = trace_clt(P_TEST, np.eye(3), 30, 200, RngSpec(2, 0), workers=1)
    assert 0.0 <= result['pvalue'] <= 1.0
    assert result['trials'] == 200


def test_spectral_histogram():
    df = spectral_histogram(np.eye(3), 30, 5, 10, 'MP', RngSpec(4, 0), workers=1)
    assert len(df) == 10
    assert list(df.columns) == ['bin_lo', 'bin_hi', 'empirical', 'mp_density', 'sc_density']
    widths = df['bin_hi'] - df['bin_lo']
    assert abs(float((df['empirical'] * widths).sum()) - 1.0) < 1e-9
    with pytest.raises(BadInputError):
        spectral_histogram(np.eye(3), 30, 5, 5)
