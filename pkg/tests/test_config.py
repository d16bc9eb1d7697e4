# -*- coding: utf-8 -*-
"""
Unit tests for src/config.py: flag > WBL_* environment > default.
"""

import pytest

from src import config
from src.errors import ParameterError


def test_defaults_apply_without_flag_or_environment():
    assert config.resolve('seed', None, {}) == 0
    assert config.resolve('precision', None, {}) == 9
    assert config.resolve('margin', None, {}) == 0.02


def test_environment_overrides_default():
    env = {'WBL_CONTROL_POINTS': '17', 'WBL_MARGIN': '0.05'}
    assert config.resolve('control_points', None, env) == 17
    assert config.resolve('margin', None, env) == 0.05


def test_flag_overrides_environment():
    assert config.resolve('threads', 4, {'WBL_THREADS': '2'}) == 4


def test_blank_environment_value_is_ignored():
    assert config.resolve('pairs', None, {'WBL_PAIRS': '  '}) == 10000


def test_malformed_environment_value():
    with pytest.raises(ParameterError) as info:
        config.resolve('seed', None, {'WBL_SEED': 'abc'})
    assert 'WBL_SEED' in str(info.value)


def test_unknown_setting():
    with pytest.raises(KeyError):
        config.resolve('colour', None, {})


def test_resolve_all_covers_every_setting():
    out = config.resolve_all({'seed': 7}, {'WBL_TOLERANCE': '0.001'})
    assert set(out) == set(config.DEFAULTS)
    assert out['seed'] == 7
    assert out['tolerance'] == 0.001
    assert config.env_name('control_points') == 'WBL_CONTROL_POINTS'


def test_explicit_names_flags_and_set_environment_variables():
    flags = {'resolution': 8, 'pairs': None, 'seed': None}
    env = {'WBL_PAIRS': '50', 'WBL_SEED': ' '}
    assert config.explicit(flags, env) == {'resolution', 'pairs'}
    assert config.explicit({}, {}) == set()
