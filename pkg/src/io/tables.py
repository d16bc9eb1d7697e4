from __future__ import annotations

import json
import math

import numpy as np
import pandas as pd

# leading columns of every witness table; anything else follows in first-seen order
LEADING_COLS = ["record", "condition", "value"]


def round_sig(x, digits):
    """x rounded to `digits` significant digits (non-finite values become None)."""
    x = float(x)
    if not math.isfinite(x):
        return None
    if x == 0.0:
        return 0.0
    return float("%.*g" % (int(digits), x))


def clean(obj, digits=9):
    """JSON-ready copy of obj: numpy scalars/arrays unwrapped, floats rounded."""
    if isinstance(obj, dict):
        return {str(k): clean(v, digits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean(v, digits) for v in obj]
    if isinstance(obj, np.ndarray):
        return clean(obj.tolist(), digits)
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return round_sig(obj, digits)
    return obj


def to_json(obj, precision=9):
    """A single JSON object; identical inputs give identical text."""
    return json.dumps(clean(obj, precision), allow_nan=False)


def point_columns(prefix, point):
    return {"%s%d" % (prefix, j + 1): float(v) for j, v in enumerate(point)}


def witness_frame(rows):
    """Table of witness rows with the leading columns first."""
    df = pd.DataFrame(rows)
    for c in LEADING_COLS:
        if c not in df.columns:
            df[c] = np.nan
    extras = [c for c in df.columns if c not in LEADING_COLS]
    return df[LEADING_COLS + extras]


def to_csv(df, precision=9):
    return df.to_csv(index=False, float_format="%%.%dg" % int(precision))
