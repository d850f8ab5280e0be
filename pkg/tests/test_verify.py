#!/usr/bin/env python3
"""
Test the verification suite runner on the exact (non-sampling) suites
"""

import json
import sys
from pathlib import Path

import pytest

# Add project root to Python path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from pipelines.verify import SUITES, VerificationSuite
from utils.sampling import RngSpec


def test_every_suite_has_a_phase():
    suite = VerificationSuite(n_max=2)
    assert list(suite.phases()) == list(SUITES)


def test_exact_suites_pass(tmp_path):
    suite = VerificationSuite(n_max=3, output_dir=str(tmp_path))
    results = suite.run(['sigma-routes', 'circ-routes', 'inversion', 'isotropic', 'limits', 'golden'])
    assert all(results.values()), suite.failures
    assert suite.checks > 0

    stats = json.loads((tmp_path / 'verify_stats.json').read_text())
    assert stats['failures'] == []
    assert stats['checks'] == suite.checks
    assert stats['rng']['algorithm'] == 'MT19937'


def test_counting_suite(tmp_path):
    suite = VerificationSuite(n_max=4, instances=5, rng=RngSpec(3, 0), output_dir=str(tmp_path))
    assert suite.run_phase('counting'), suite.failures


def test_wick_cross_checks(tmp_path):
    suite = VerificationSuite(n_max=2, output_dir=str(tmp_path))
    assert suite.run_phase('mplus-wick')
    assert suite.run_phase('hn-wick')


def test_unknown_suite(tmp_path):
    with pytest.raises(KeyError):
        VerificationSuite(output_dir=str(tmp_path)).run(['everything'])
