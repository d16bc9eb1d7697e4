"""
Input Validation for point arguments
====================================

Strict validation and flagging for raw point inputs (CLI strings, JSON arrays,
Python sequences) before they reach the numerical modules.

Core validity conditions:
    - coordinates numeric and finite (not NaN/inf)
    - at least one coordinate
    - dimension matches the computation context, when one is given
    - the point lies in the open domain, when a domain is given

Points with norm in [1 - 1e-9, 1) are accepted inside the unit ball but carry
'flag_near_boundary'; that flag never makes a point invalid.
"""

from __future__ import annotations

import math

NEAR_BOUNDARY = 1e-9


def _is_nan(x):
    return x != x


def _is_inf(x):
    return x == float('inf') or x == float('-inf')


def parse_point_text(text):
    """Split '0.5,0' into a list of raw coordinate strings."""
    text = str(text).strip()
    if text.startswith('[') and text.endswith(']'):
        text = text[1:-1]
    if not text:
        return []
    return [s.strip() for s in text.split(',')]


def validate_point_inputs(coords, dimension=None, domain=None, strict=True):
    """
    Validate raw point coordinates.

    Parameters
    ----------
    coords : str or sequence
        Comma-separated text ("0.5,0") or a sequence of numbers.
    dimension : int or None
        Required dimension, if fixed by the context.
    domain : src.geometry.Domain or None
        Domain the point must lie in.
    strict : bool
        If True, any flag other than 'flag_near_boundary' invalidates the point.

    Returns a dict:
        {
          'is_valid': bool,
          'flags': [str, ...],
          'normalized': {'coords': [float, ...]}   (empty when invalid)
        }
    """
    flags = []
    normalized = {}

    if isinstance(coords, str):
        raw = parse_point_text(coords)
    else:
        try:
            raw = list(coords)
        except TypeError:
            raw = [coords]

    if len(raw) == 0:
        flags.append('flag_empty_point')

    values = []
    for x in raw:
        try:
            v = float(x)
        except (TypeError, ValueError):
            flags.append('flag_non_numeric_coord')
            continue
        if _is_nan(v):
            flags.append('flag_nan_coord')
            continue
        if _is_inf(v):
            flags.append('flag_inf_coord')
            continue
        values.append(v)

    complete = len(values) == len(raw) and len(values) > 0

    if complete and dimension is not None and len(values) != int(dimension):
        flags.append('flag_dimension_mismatch')

    if complete and domain is not None and 'flag_dimension_mismatch' not in flags:
        if len(values) != domain.dim:
            flags.append('flag_dimension_mismatch')
        elif not domain.contains(values):
            flags.append('flag_outside_domain')
        elif domain.kind == 'unit_ball':
            r = math.sqrt(sum(v * v for v in values))
            if r >= 1.0 - NEAR_BOUNDARY:
                flags.append('flag_near_boundary')

    blocking = [f for f in flags if f != 'flag_near_boundary']
    is_valid = (len(blocking) == 0) if strict else complete

    if is_valid:
        normalized = {'coords': values}

    return {'is_valid': is_valid, 'flags': flags, 'normalized': normalized}
