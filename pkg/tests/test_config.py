#!/usr/bin/env python3
"""
Test environment configuration loading and validation
"""

import sys
from pathlib import Path

# Add project root to Python path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from utils.config import DEFAULTS, load_config, validate_config


def test_defaults(monkeypatch):
    monkeypatch.delenv('WISHART_SEED', raising=False)
    monkeypatch.delenv('WISHART_WICK_CAP', raising=False)
    config = load_config()
    assert config['seed'] == DEFAULTS['seed']
    assert config['wick_cap'] == 10
    assert validate_config(config) == []


def test_environment_and_overrides(monkeypatch):
    monkeypatch.setenv('WISHART_SEED', '99')
    monkeypatch.setenv('WISHART_FORMAT', 'json')
    config = load_config({'stream': 4, 'workers': None})
    assert config['seed'] == 99
    assert config['stream'] == 4
    assert config['format'] == 'JSON'
    assert config['workers'] >= 1


def test_validation_problems(monkeypatch):
    monkeypatch.setenv('WISHART_H_CAP', 'eight')
    config = load_config({'workers': 0, 'format': 'xml'})
    problems = validate_config(config)
    assert any('WISHART_H_CAP' in p for p in problems)
    assert any('WISHART_WORKERS' in p for p in problems)
    assert any('WISHART_FORMAT' in p for p in problems)
