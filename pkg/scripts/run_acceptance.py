# -*- coding: utf-8 -*-
"""
Run the full-scale acceptance checks.

Writes:
  outputs/acceptance_results.csv
  outputs/acceptance_report.txt

Usage (from project root):
  python scripts/run_acceptance.py

Notes:
  - The unit tests run the same checks on reduced samples; this script runs
    them at full size (10^5 pairs, 200x200 grids, 100 geodesic solves).
  - Sizes can be reduced through the environment:
      ACCEPT_PAIRS (100000), ACCEPT_RESOLUTION (200), ACCEPT_GEODESICS (100),
      WBL_SEED (0), WBL_THREADS (1).
"""

from __future__ import annotations

import logging
import os
import sys
import time
from pathlib import Path

import numpy as np
import pandas as pd

# ---------------------------------------------------------------------
# Ensure `import src.*` works when running as a script:
# project_root/scripts/run_acceptance.py -> add project_root to sys.path
# ---------------------------------------------------------------------
ROOT = Path(__file__).resolve().parents[1]
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from src import config  # noqa: E402
from src.geodesic import GeodesicOptions, geodesic_distance  # noqa: E402
from src.geometry import unit_ball  # noqa: E402
from src.hyperbolic import (  # noqa: E402
    bracket,
    hyperbolic_distance,
    lemma_bound,
    mobius,
    scalar_gap,
    sinh2_rho,
)
from src.kernels import (  # noqa: E402
    ClosedFormDistance,
    GeodesicDistance,
    canonical_kernel,
    check_admissible,
    geometric_mean_kernel,
    min_weight_kernel,
)
from src.maps import identity_map, map_from_spec  # noqa: E402
from src.sampling import grid_sampler  # noqa: E402
from src.seminorms import (  # noqa: E402
    bloch_seminorm,
    dw_quotient_seminorm,
    hyperbolic_lipschitz_check,
    lipschitz_seminorm,
    verify_equality,
)
from src.weights import builtin_weight  # noqa: E402

EXPECTED_BLOCH = {
    'identity': 1.0,
    'poly:0,0,1': 4.0 / (3.0 * np.sqrt(3.0)),
    'atanh': 1.0,
}


def _ball_pairs(rng, count, m, rmax):
    def pts():
        v = rng.normal(size=(count, m))
        v /= np.linalg.norm(v, axis=1)[:, None]
        return v * (rmax * rng.uniform(0.0, 1.0, count))[:, None]
    return pts(), pts()


def _relerr(a, b):
    return np.abs(a - b) / np.maximum(np.abs(b), 1e-300)


def main() -> None:
    out_dir = ROOT / "outputs"
    out_dir.mkdir(parents=True, exist_ok=True)
    out_csv = out_dir / "acceptance_results.csv"
    out_report = out_dir / "acceptance_report.txt"

    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")

    n_pairs = int(os.environ.get("ACCEPT_PAIRS", "100000"))
    resolution = int(os.environ.get("ACCEPT_RESOLUTION", "200"))
    n_geodesics = int(os.environ.get("ACCEPT_GEODESICS", "100"))
    seed = config.resolve('seed')
    threads = config.resolve('threads')

    rng = np.random.default_rng(seed)
    rows = []

    def record(check, passed, value=np.nan, detail=""):
        rows.append({"check": check, "passed": bool(passed), "value": value, "detail": detail})

    # 1. hyperbolic identities
    for m in (2, 3):
        t0 = time.perf_counter()
        Z, E = _ball_pairs(rng, n_pairs, m, 0.95)
        d2 = np.sum((Z - E) ** 2, axis=1)
        br = bracket(Z, E)
        modT = np.linalg.norm(mobius(Z, E), axis=1)
        err = max(
            float(np.max(_relerr(modT, np.sqrt(d2) / br))),
            float(np.max(_relerr(1 - modT ** 2, (1 - np.sum(Z * Z, 1)) * (1 - np.sum(E * E, 1)) / br ** 2))),
            float(np.max(_relerr(np.sinh(hyperbolic_distance(Z, E)) ** 2, sinh2_rho(Z, E)))),
        )
        elapsed = time.perf_counter() - t0
        record("identities_B%d" % m, err <= 1e-10 and elapsed < 10.0, err, "%.2fs" % elapsed)

    # 2. distance inequality
    Z, E = _ball_pairs(rng, n_pairs, 2, 0.95)
    lhs, rhs = lemma_bound(Z, E)
    violations = int(np.sum(lhs > rhs))
    record("lemma_violations", violations == 0, violations)
    g = scalar_gap(np.linspace(0.0, 0.999, 10000))
    record("scalar_gap_nonnegative", bool(np.all(g >= 0.0)), float(np.min(g)))
    u = rng.normal(size=Z[:1000].shape)
    u /= np.linalg.norm(u, axis=1)[:, None]
    Zc = Z[:1000] * 0.9
    lhs, rhs = lemma_bound(Zc, Zc + 1e-4 * u)
    ratio = float(np.min(lhs / rhs))
    record("lemma_near_diagonal_ratio", ratio >= 0.999, ratio)

    # 3. geodesic solver against the closed form
    ball = unit_ball(2)
    w = builtin_weight('hyperbolic', None, ball)
    A, B = _ball_pairs(rng, n_geodesics, 2, 0.9)
    worst_err, worst_time = 0.0, 0.0
    for a, b in zip(A, B):
        t0 = time.perf_counter()
        res = geodesic_distance(w, a, b)
        worst_time = max(worst_time, time.perf_counter() - t0)
        worst_err = max(worst_err, float(_relerr(res.value, hyperbolic_distance(a, b))))
    record("geodesic_oracle", worst_err <= 1e-3, worst_err, "slowest solve %.2fs" % worst_time)

    # 4-6. semi-norm equality, one-sided bound, d_w quotient
    s = grid_sampler(resolution=resolution, pair_budget=n_pairs, seed=seed)
    closed = ClosedFormDistance(ball)
    for name, expected in EXPECTED_BLOCH.items():
        f = map_from_spec(name)
        for k in (geometric_mean_kernel(ball, w), min_weight_kernel(w)):
            rep = verify_equality(f, w, k, s, tol=1e-2, threads=threads)
            record("equality_%s_%s" % (name, k.kind), rep.verdict == "pass", rep.difference,
                   "B=%.6f L=%.6f expected B=%.6f" % (rep.bloch.value, rep.lipschitz.value, expected))
            gap = rep.lipschitz.value - rep.bloch.value
            record("one_sided_%s_%s" % (name, k.kind), gap <= 1e-3, gap)
        B = bloch_seminorm(f, w, s, threads).value
        q = dw_quotient_seminorm(f, closed, s, threads).value
        record("dw_quotient_%s" % name, abs(q - B) <= 1e-2 * max(B, 1.0), q, "B=%.6f" % B)

    # 7. admissibility
    for k in (geometric_mean_kernel(ball, w), min_weight_kernel(w)):
        rep = check_admissible(k, w, closed, sample_pairs=min(n_pairs, 10000), seed=seed, threads=threads)
        record("admissible_%s" % k.kind, rep.passed, np.nan, str(rep.verdict))
    rep = check_admissible(geometric_mean_kernel(ball, w).scaled(2.0), w, closed,
                           sample_pairs=min(n_pairs, 10000), seed=seed, threads=threads)
    record("scaled_kernel_fails_W2", bool(rep.w2_violations), len(rep.w2_violations))
    geodesic = GeodesicDistance(w, GeodesicOptions(seed=seed), threads)
    rep = check_admissible(min_weight_kernel(w), w, geodesic, sample_pairs=min(n_pairs, 1000),
                           seed=seed, threads=threads)
    record("admissible_min_weight_geodesic", rep.passed, np.nan, str(rep.verdict))
    # canonical kernel from numerical distances, measured against the closed form
    canon = canonical_kernel(w, GeodesicOptions(seed=seed), threads=threads)
    rep = check_admissible(canon, w, closed, sample_pairs=min(n_pairs, 1000), seed=seed, threads=threads)
    record("admissible_canonical_geodesic", rep.passed, rep.violation_counts['W4'], str(rep.verdict))
    ratios = [p["min_ratio"] for p in rep.liminf_profile]
    record("canonical_liminf_trend", all(a < b for a, b in zip(ratios, ratios[1:])), ratios[-1],
           " ".join("%.6f" % r for r in ratios))
    A, B = _ball_pairs(rng, n_geodesics, 2, 0.9)
    sep = np.linalg.norm(A - B, axis=1)
    w4_err = float(np.max(np.abs(closed(A, B) * canon.values(A, B) - sep) / sep))
    record("canonical_W4_error", w4_err <= 1e-3, w4_err)

    # 8. sharpness of the hyperbolic Lipschitz bound
    f = map_from_spec('colonna')
    B = bloch_seminorm(f, w, s, threads).value
    record("colonna_bloch", abs(B - 4.0 / np.pi) <= 1e-3, B)
    chk = hyperbolic_lipschitz_check(f, 4.0 / np.pi, s.pairs(ball))
    record("colonna_lipschitz", chk['violations'] == 0, chk['max_ratio'], "%d pairs" % chk['pairs'])

    # 9. identity map: kernel supremum equals weight supremum
    ident = identity_map(2)
    sup_w = bloch_seminorm(ident, w, s, threads).value
    for k in (geometric_mean_kernel(ball, w), min_weight_kernel(w),
              canonical_kernel(w, distance=closed)):
        sup_k = lipschitz_seminorm(ident, k, s, threads).value
        record("identity_sup_%s" % k.kind, abs(sup_k - sup_w) <= 1e-3, sup_k, "sup w=%.6f" % sup_w)

    out_df = pd.DataFrame(rows)
    out_df.to_csv(out_csv, index=False, float_format="%.9g")

    n_pass = int(out_df["passed"].sum())
    report_lines = []
    report_lines.append(f"Output: {out_csv}")
    report_lines.append(f"Pairs: {n_pairs}  grid resolution: {resolution}  geodesic solves: {n_geodesics}")
    report_lines.append("")
    report_lines.append(f"Checks passed: {n_pass} / {len(out_df)}")
    report_lines.append("")
    for _, r in out_df.iterrows():
        status = "ok  " if r["passed"] else "FAIL"
        report_lines.append(f"  {status} {r['check']:<36} {r['value']:.6g}  {r['detail']}")

    out_report.write_text("\n".join(report_lines), encoding="utf-8")
    print("\n".join(report_lines))
    if n_pass != len(out_df):
        raise SystemExit(1)


if __name__ == "__main__":
    main()
