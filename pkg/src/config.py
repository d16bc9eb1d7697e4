# -*- coding: utf-8 -*-
"""
Run configuration
=================

Precedence: command-line flag > environment variable WBL_<NAME> > default.

    WBL_SEED            0
    WBL_PRECISION       9      significant digits in JSON / CSV output
    WBL_THREADS         1
    WBL_CONTROL_POINTS  33
    WBL_PAIRS           10000
    WBL_RESOLUTION      200
    WBL_MARGIN          0.02
    WBL_TOLERANCE       0.01   verify tolerance

A malformed environment value is a usage error.
"""

from __future__ import annotations

import os

from src.errors import ParameterError

ENV_PREFIX = 'WBL_'

DEFAULTS = {
    'seed': 0,
    'precision': 9,
    'threads': 1,
    'control_points': 33,
    'pairs': 10000,
    'resolution': 200,
    'margin': 0.02,
    'tolerance': 1e-2,
}

_TYPES = {
    'seed': int,
    'precision': int,
    'threads': int,
    'control_points': int,
    'pairs': int,
    'resolution': int,
    'margin': float,
    'tolerance': float,
}


def env_name(name):
    return ENV_PREFIX + name.upper()


def resolve(name, flag_value=None, environ=None):
    """Value of setting `name` after applying the precedence rule."""
    if name not in DEFAULTS:
        raise KeyError(name)
    if flag_value is not None:
        return _TYPES[name](flag_value)
    environ = os.environ if environ is None else environ
    raw = environ.get(env_name(name))
    if raw is None or not str(raw).strip():
        return DEFAULTS[name]
    try:
        return _TYPES[name](str(raw).strip())
    except ValueError:
        raise ParameterError("environment variable %s=%r is not a valid %s"
                             % (env_name(name), raw, _TYPES[name].__name__))


def resolve_all(flags, environ=None):
    """Resolve every known setting; `flags` maps names to flag values or None."""
    return {name: resolve(name, flags.get(name), environ) for name in DEFAULTS}


def explicit(flags, environ=None):
    """Names set by a flag or a non-blank environment variable."""
    environ = os.environ if environ is None else environ
    return {name for name in DEFAULTS
            if flags.get(name) is not None or str(environ.get(env_name(name), '')).strip()}
