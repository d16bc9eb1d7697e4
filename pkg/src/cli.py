# -*- coding: utf-8 -*-
"""
Command-line front end
======================

    wbl distance         --weight W --from P --to Q [--exact] [--control-points N]
    wbl seminorm         --map F --weight W [--kind bloch|lipschitz|dw-quotient] ...
    wbl check-admissible --kernel K --weight W [--pairs N] ...
    wbl verify           --map F --weight W --kernel K [--tolerance T] ...
    wbl catalog          [--map F --at P]

Output: --json (one object on stdout), --csv (header row, then one row per
witness, path point or map), or human-readable text (default).

Exit codes:
    0  success
    1  verify verdict "fail"
    2  usage or parse error
    3  numerical failure (solver non-convergence, positivity violation)

Settings follow flag > WBL_* environment variable > default (src.config).
"""

from __future__ import annotations

import argparse
import contextlib
import logging
import sys

import numpy as np

from src import config
from src.errors import NUMERICAL_ERRORS, USAGE_ERRORS, ParameterError
from src.geodesic import GeodesicOptions, geodesic_distance
from src.geometry import box, unit_ball
from src.hyperbolic import hyperbolic_distance
from src.io.tables import point_columns, to_csv, to_json, witness_frame
from src.kernels import check_admissible, distance_provider, kernel_from_spec
from src.maps import CATALOG, map_from_spec
from src.sampling import Sampler
from src.seminorms import (
    bloch_seminorm,
    dw_quotient_seminorm,
    jacobian_at,
    lipschitz_seminorm,
    verify_equality,
)
from src.validate import parse_point_text, validate_point_inputs
from src.weights import weight_from_spec

logger = logging.getLogger(__name__)

# defaults when every sampled pair costs a geodesic solve
SOLVER_RESOLUTION = 20
SOLVER_PAIRS = 1000


# ---------------------------------------------------------------------
# argument helpers
# ---------------------------------------------------------------------
def _domain(text, dim):
    text = str(text).strip()
    if text == 'ball':
        return unit_ball(dim)
    head, sep, tail = text.partition(':')
    if head == 'box' and sep:
        vals = [float(x) for x in tail.split(',') if x.strip()]
        if len(vals) != 2 * dim:
            raise ParameterError("box domain needs %d numbers (lower then upper corner)" % (2 * dim))
        return box(vals[:dim], vals[dim:])
    raise ParameterError("unknown domain %r (expected 'ball' or 'box:lo1,..,hi1,..')" % text)


def _point(text, domain, flag):
    res = validate_point_inputs(text, domain.dim, domain)
    if not res['is_valid']:
        raise ParameterError("%s %r rejected: %s" % (flag, text, ', '.join(res['flags'])))
    if 'flag_near_boundary' in res['flags']:
        logger.warning("%s lies within 1e-9 of the unit sphere", flag)
    return np.array(res['normalized']['coords'], dtype=float)


def _point_dim(text):
    return max(1, len(parse_point_text(text)))


def _sampler(args, settings, pairs=None):
    return Sampler(
        strategy=args.sampler.replace('-', '_'),
        resolution=settings['resolution'],
        count=args.count,
        seed=settings['seed'],
        boundary_margin=settings['margin'],
        pair_budget=settings['pairs'] if pairs is None else pairs,
    )


def _geodesic_opts(args, settings):
    return GeodesicOptions(control_points=settings['control_points'],
                           max_iterations=args.max_iterations, seed=settings['seed'])


def _distance(args, w, settings):
    kind = args.distance
    if kind is None:
        kind = 'closed-form' if (w.domain.kind == 'unit_ball' and w.name == 'hyperbolic') else 'geodesic'
    if kind == 'closed-form' and (w.domain.kind != 'unit_ball' or w.name != 'hyperbolic'):
        raise ParameterError("the closed-form distance needs --domain ball and --weight hyperbolic")
    return distance_provider(kind.replace('-', '_'), w, _geodesic_opts(args, settings),
                             settings['threads'])


def _solver_budget(args, settings):
    """Default sampling cut down for runs that solve one geodesic per sampled pair."""
    out = dict(settings)
    if 'resolution' not in args.explicit:
        out['resolution'] = min(settings['resolution'], SOLVER_RESOLUTION)
    if 'pairs' not in args.explicit:
        out['pairs'] = min(settings['pairs'], SOLVER_PAIRS)
    return out


def _warn_solves(count, what):
    logger.warning("%s needs up to %d geodesic solves; lower --resolution/--pairs if this is slow",
                   what, count)


# ---------------------------------------------------------------------
# subcommands; each returns (payload, csv rows, exit code)
# ---------------------------------------------------------------------
def cmd_distance(args, settings):
    dim = _point_dim(args.from_point)
    domain = _domain(args.domain, dim)
    w = weight_from_spec(args.weight, domain)
    a = _point(args.from_point, domain, '--from')
    b = _point(args.to_point, domain, '--to')
    if args.exact:
        if domain.kind != 'unit_ball' or w.name != 'hyperbolic':
            raise ParameterError("--exact needs --domain ball and --weight hyperbolic")
        value = hyperbolic_distance(a, b)
        payload = {'value': value, 'method': 'closed_form', 'weight': w.label}
        rows = [{'record': 'distance', 'value': value}]
        return payload, rows, 0
    res = geodesic_distance(w, a, b, _geodesic_opts(args, settings))
    payload = dict(res.to_dict(), method='geodesic', weight=w.label)
    rows = [dict({'record': 'path', 'index': i}, **point_columns('x', p))
            for i, p in enumerate(res.path.points)]
    rows.insert(0, {'record': 'distance', 'value': res.value})
    return payload, rows, 0 if res.converged else 3


def cmd_seminorm(args, settings):
    f = map_from_spec(args.map, args.dimension)
    domain = _domain(args.domain, f.dimension_in)
    w = weight_from_spec(args.weight, domain)
    threads = settings['threads']
    if args.kind == 'bloch':
        est = bloch_seminorm(f, w, _sampler(args, settings), threads)
    elif args.kind == 'lipschitz':
        k = kernel_from_spec(args.kernel, w, _geodesic_opts(args, settings), threads=threads)
        solves = k.kind == 'canonical'
        if args.kernel_scale != 1.0:
            k = k.scaled(args.kernel_scale)
        s = _sampler(args, _solver_budget(args, settings) if solves else settings)
        if solves:
            _warn_solves(len(s.pairs(domain)), k.label)
        est = lipschitz_seminorm(f, k, s, threads)
    else:
        dist = _distance(args, w, settings)
        s = _sampler(args, settings if dist.exact else _solver_budget(args, settings))
        if not dist.exact:
            _warn_solves(len(s.pairs(domain)), 'd_w quotient')
        est = dw_quotient_seminorm(f, dist, s, threads, domain=domain)
    payload = dict(est.to_dict(), map=f.label, weight=w.label)
    row = {'record': 'seminorm', 'condition': est.kind, 'value': est.value,
           'samples_used': est.samples_used, 'skipped': est.skipped}
    if est.witness is not None:
        if est.kind == 'bloch':
            row.update(point_columns('z', est.witness))
        else:
            row.update(point_columns('z', est.witness[0]))
            row.update(point_columns('e', est.witness[1]))
    return payload, [row], 0


def cmd_check_admissible(args, settings):
    domain = _domain(args.domain, args.dimension)
    w = weight_from_spec(args.weight, domain)
    opts = _geodesic_opts(args, settings)
    dist = _distance(args, w, settings)
    k = kernel_from_spec(args.kernel, w, opts, distance=dist if args.kernel == 'canonical' else None,
                         threads=settings['threads'])
    if args.kernel_scale != 1.0:
        k = k.scaled(args.kernel_scale)
    if not dist.exact:
        settings = _solver_budget(args, settings)
        _warn_solves(settings['pairs'], k.label)
    report = check_admissible(k, w, dist, sample_pairs=settings['pairs'],
                              tolerance=args.tolerance, seed=settings['seed'],
                              margin=settings['margin'], threads=settings['threads'])
    payload = dict(report.to_dict(), kernel=k.label, weight=w.label, distance=dist.label)
    rows = []
    for cond, items in (('W1', report.w1_violations), ('W2', report.w2_violations),
                        ('W3', report.w3_violations), ('W4', report.w4_violations)):
        for item in items:
            row = {'record': 'violation', 'condition': cond}
            for key, val in item.items():
                if isinstance(val, list) and key in ('z', 'e'):
                    row.update(point_columns(key, val))
                elif not isinstance(val, list):
                    row[key] = val
            rows.append(row)
    if not rows:
        rows = [{'record': 'verdict', 'condition': c, 'value': v}
                for c, v in report.verdict.items()]
    return payload, rows, 0


def cmd_verify(args, settings):
    f = map_from_spec(args.map, args.dimension)
    domain = _domain(args.domain, f.dimension_in)
    w = weight_from_spec(args.weight, domain)
    k = kernel_from_spec(args.kernel, w, _geodesic_opts(args, settings), threads=settings['threads'])
    solves = k.kind == 'canonical'
    if args.kernel_scale != 1.0:
        k = k.scaled(args.kernel_scale)
    s = _sampler(args, _solver_budget(args, settings) if solves else settings)
    if solves:
        _warn_solves(len(s.pairs(domain)), k.label)
    report = verify_equality(f, w, k, s, tol=settings['tolerance'], threads=settings['threads'],
                             bloch_sampler=_sampler(args, settings))
    payload = dict(report.to_dict(), map=f.label, weight=w.label, kernel=k.label)
    rows = [
        {'record': 'bloch', 'value': report.bloch.value, 'condition': report.verdict},
        {'record': 'lipschitz', 'value': report.lipschitz.value, 'condition': report.verdict},
    ]
    return payload, rows, 0 if report.verdict == 'pass' else 1


def cmd_catalog(args, settings):
    if args.map is None:
        payload = {'maps': [{'name': n, 'description': d} for n, d in sorted(CATALOG.items())]}
        rows = [{'record': 'map', 'condition': n, 'description': d} for n, d in sorted(CATALOG.items())]
        return payload, rows, 0
    f = map_from_spec(args.map, args.dimension)
    payload = {'map': f.label, 'dimension_in': f.dimension_in, 'dimension_out': f.dimension_out}
    rows = [{'record': 'map', 'condition': f.label}]
    if args.at is not None:
        domain = unit_ball(f.dimension_in)
        p = _point(args.at, domain, '--at')
        value = f.values(p)
        J = jacobian_at(f, p, domain=domain)
        payload.update({'point': p, 'value': value, 'jacobian': J})
        rows = [dict({'record': 'value'}, **point_columns('f', value), **point_columns('x', p))]
    return payload, rows, 0


# ---------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------
def _common(p):
    out = p.add_mutually_exclusive_group()
    out.add_argument('--json', dest='output', action='store_const', const='json')
    out.add_argument('--csv', dest='output', action='store_const', const='csv')
    out.add_argument('--output', dest='output', choices=('json', 'csv', 'human'))
    p.add_argument('--seed', type=int, default=None)
    p.add_argument('--precision', type=int, default=None)
    p.add_argument('--threads', type=int, default=None)
    p.add_argument('-v', '--verbose', action='count', default=0)


def _sampling(p):
    p.add_argument('--sampler', choices=('grid', 'low-discrepancy'), default='grid')
    p.add_argument('--resolution', type=int, default=None)
    p.add_argument('--count', type=int, default=4096)
    p.add_argument('--margin', type=float, default=None)
    p.add_argument('--pairs', type=int, default=None)


def _solver(p):
    p.add_argument('--control-points', dest='control_points', type=int, default=None)
    p.add_argument('--max-iterations', dest='max_iterations', type=int, default=500)


def build_parser():
    parser = argparse.ArgumentParser(prog='wbl', description="Weighted Bloch and Lipschitz-type semi-norms")
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('distance', help="w-distance between two points")
    _common(p)
    _solver(p)
    p.add_argument('--weight', required=True)
    p.add_argument('--domain', default='ball')
    p.add_argument('--from', dest='from_point', required=True)
    p.add_argument('--to', dest='to_point', required=True)
    p.add_argument('--exact', action='store_true', help="closed-form ρ (unit ball, hyperbolic weight)")
    p.set_defaults(handler=cmd_distance)

    p = sub.add_parser('seminorm', help="estimate one semi-norm of a catalog map")
    _common(p)
    _sampling(p)
    _solver(p)
    p.add_argument('--map', required=True)
    p.add_argument('--weight', required=True)
    p.add_argument('--domain', default='ball')
    p.add_argument('--dimension', type=int, default=2)
    p.add_argument('--kind', choices=('bloch', 'lipschitz', 'dw-quotient'), default='bloch')
    p.add_argument('--kernel', default='geometric-mean')
    p.add_argument('--kernel-scale', dest='kernel_scale', type=float, default=1.0)
    p.add_argument('--distance', choices=('closed-form', 'geodesic'), default=None)
    p.set_defaults(handler=cmd_seminorm)

    p = sub.add_parser('check-admissible', help="test conditions W1-W4 for a kernel")
    _common(p)
    _solver(p)
    p.add_argument('--kernel', required=True)
    p.add_argument('--kernel-scale', dest='kernel_scale', type=float, default=1.0)
    p.add_argument('--weight', required=True)
    p.add_argument('--domain', default='ball')
    p.add_argument('--dimension', type=int, default=2)
    p.add_argument('--pairs', type=int, default=None)
    p.add_argument('--margin', type=float, default=None)
    p.add_argument('--tolerance', type=float, default=1e-6)
    p.add_argument('--distance', choices=('closed-form', 'geodesic'), default=None)
    p.set_defaults(handler=cmd_check_admissible)

    p = sub.add_parser('verify', help="compare the Bloch and Lipschitz estimates")
    _common(p)
    _sampling(p)
    _solver(p)
    p.add_argument('--map', required=True)
    p.add_argument('--weight', required=True)
    p.add_argument('--kernel', required=True)
    p.add_argument('--kernel-scale', dest='kernel_scale', type=float, default=1.0)
    p.add_argument('--domain', default='ball')
    p.add_argument('--dimension', type=int, default=2)
    p.add_argument('--tolerance', type=float, default=None)
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser('catalog', help="list catalog maps or evaluate one")
    _common(p)
    p.add_argument('--map', default=None)
    p.add_argument('--dimension', type=int, default=2)
    p.add_argument('--at', default=None)
    p.set_defaults(handler=cmd_catalog)
    return parser


def _settings(args, environ=None):
    flags = {name: getattr(args, name, None) for name in config.DEFAULTS}
    args.explicit = config.explicit(flags, environ)
    return config.resolve_all(flags, environ)


def _human(payload, indent=0):
    lines = []
    pad = '  ' * indent
    for key, val in payload.items():
        if isinstance(val, dict):
            lines.append('%s%s:' % (pad, key))
            lines.extend(_human(val, indent + 1))
        else:
            lines.append('%s%s: %s' % (pad, key, val))
    return lines


def _configure_logging(verbosity, stream):
    level = logging.WARNING if verbosity <= 0 else (logging.INFO if verbosity == 1 else logging.DEBUG)
    logging.basicConfig(level=level, stream=stream,
                        format="%(levelname)s %(name)s: %(message)s", force=True)
    logging.getLogger('src').setLevel(level)


def run(argv=None, stdout=None, stderr=None, environ=None):
    """
    Run one invocation; returns the exit code.

    Output goes to `stdout`, diagnostics to `stderr` (default: sys streams).
    """
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        # argparse writes usage, errors and --help to the sys streams
        with contextlib.redirect_stderr(stderr), contextlib.redirect_stdout(stdout):
            args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    _configure_logging(args.verbose, stderr)

    try:
        settings = _settings(args, environ)
        payload, rows, code = args.handler(args, settings)
    except NUMERICAL_ERRORS as exc:
        stderr.write('error: %s\n' % exc)
        return 3
    except USAGE_ERRORS as exc:
        stderr.write('error: %s\n' % exc)
        return 2

    precision = settings['precision']
    mode = args.output or 'human'
    if mode == 'json':
        stdout.write(to_json(payload, precision) + '\n')
    elif mode == 'csv':
        stdout.write(to_csv(witness_frame(rows), precision))
    else:
        stdout.write('\n'.join(_human(payload)) + '\n')
    if code == 3:
        stderr.write('error: geodesic solver did not converge\n')
    return code


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == '__main__':
    main()
