#!/usr/bin/env python3
"""
Runtime configuration

Values come from the environment (optionally a .env file in the working
directory) with documented defaults. Command-line flags override them.
"""

import os
import logging
from typing import Dict, Any, List, Optional

from dotenv import load_dotenv

logger = logging.getLogger(__name__)

load_dotenv()

DEFAULTS = {
    'seed': 20240601,
    'stream': 0,
    'workers': os.cpu_count() or 1,
    'wick_cap': 10,
    'h_cap': 8,
    'recursion_cap': 8,
    'enum_cap': 14,
    'output_dir': 'generated',
    'log_dir': 'logs',
    'format': 'PRETTY',
}

ENV_VARS = {
    'seed': 'WISHART_SEED',
    'stream': 'WISHART_STREAM',
    'workers': 'WISHART_WORKERS',
    'wick_cap': 'WISHART_WICK_CAP',
    'h_cap': 'WISHART_H_CAP',
    'recursion_cap': 'WISHART_RECURSION_CAP',
    'enum_cap': 'WISHART_ENUM_CAP',
    'output_dir': 'WISHART_OUTPUT_DIR',
    'log_dir': 'WISHART_LOG_DIR',
    'format': 'WISHART_FORMAT',
}

INTEGER_KEYS = ['seed', 'stream', 'workers', 'wick_cap', 'h_cap', 'recursion_cap', 'enum_cap']
FORMATS = ('JSON', 'CSV', 'PRETTY')


def load_config(overrides: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    """Build the run configuration from environment defaults and overrides"""
    config: Dict[str, Any] = {}
    for key, default in DEFAULTS.items():
        raw = os.getenv(ENV_VARS[key])
        config[key] = default if raw is None else raw

    for key, value in (overrides or {}).items():
        if value is not None:
            config[key] = value

    for key in INTEGER_KEYS:
        try:
            config[key] = int(config[key])
        except (TypeError, ValueError):
            # left as-is; validate_config names it
            pass
    config['format'] = str(config['format']).upper()
    return config


def validate_config(config: Dict[str, Any]) -> List[str]:
    """Return a list of problems; empty when the configuration is usable"""
    problems = []
    for key in INTEGER_KEYS:
        value = config.get(key)
        if not isinstance(value, int):
            problems.append(f"{ENV_VARS[key]} must be an integer, got {value!r}")
        elif value < 0:
            problems.append(f"{ENV_VARS[key]} must be non-negative, got {value}")
    if isinstance(config.get('workers'), int) and config['workers'] < 1:
        problems.append(f"{ENV_VARS['workers']} must be at least 1")
    if config.get('format') not in FORMATS:
        problems.append(f"{ENV_VARS['format']} must be one of {FORMATS}, got {config.get('format')!r}")
    return problems


CONFIG = load_config()
