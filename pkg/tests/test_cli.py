# -*- coding: utf-8 -*-
"""
Integration tests for src/cli.py

Locks:
1) Exit codes: 0 success, 1 verify failure, 2 usage error, 3 numerical failure.
2) JSON output is one object with 9 significant digits, identical across runs.
3) Settings follow flag > WBL_* environment > default.
4) Every subcommand emits the documented top-level JSON keys.
"""

import io
import json

import pytest

from src.cli import SOLVER_PAIRS, SOLVER_RESOLUTION, _settings, _solver_budget, build_parser, run

SMALL = ['--resolution', '40', '--pairs', '500']


def _run(argv, environ=None):
    out, err = io.StringIO(), io.StringIO()
    code = run(argv, stdout=out, stderr=err, environ=environ or {})
    return code, out.getvalue(), err.getvalue()


def test_exact_distance_json():
    code, out, _ = _run(['distance', '--weight', 'hyperbolic', '--from', '0,0', '--to', '0.5,0',
                         '--exact', '--json'])
    assert code == 0
    payload = json.loads(out)
    assert payload['value'] == 0.549306144
    assert payload['method'] == 'closed_form'


def test_numerical_distance_json():
    code, out, _ = _run(['distance', '--weight', 'hyperbolic', '--from', '0,0', '--to', '0.5,0',
                         '--control-points', '5', '--json'])
    assert code == 0
    payload = json.loads(out)
    assert payload['value'] == pytest.approx(0.549306144, rel=1e-6)
    assert payload['converged'] is True
    assert len(payload['path']) == 5


def test_distance_csv_lists_the_path():
    code, out, _ = _run(['distance', '--weight', 'hyperbolic', '--from', '0,0', '--to', '0,0.5',
                         '--control-points', '3', '--csv'])
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].startswith('record,condition,value')
    assert len(lines) == 1 + 1 + 3


def test_unknown_identifier_in_weight_is_a_usage_error():
    code, out, err = _run(['distance', '--weight', 'expr:1-q^2', '--from', '0,0', '--to', '0.5,0'])
    assert code == 2
    assert out == ''
    assert "'q'" in err


def test_point_outside_domain_is_a_usage_error():
    code, _, err = _run(['distance', '--weight', 'hyperbolic', '--from', '0,0', '--to', '1.5,0'])
    assert code == 2
    assert 'flag_outside_domain' in err


def test_exact_needs_the_hyperbolic_weight():
    code, _, _ = _run(['distance', '--weight', 'constant:1', '--from', '0,0', '--to', '0.5,0', '--exact'])
    assert code == 2


def test_missing_required_flag_is_a_usage_error():
    code, _, _ = _run(['verify', '--map', 'identity'])
    assert code == 2


def test_positivity_violation_is_a_numerical_failure():
    code, _, err = _run(['distance', '--weight', 'hyperbolic', '--domain', 'box:-2,-2,2,2',
                         '--from', '0,0', '--to', '0.5,0'])
    assert code == 3
    assert err.startswith('error:')


def test_verify_passes_for_the_square_map():
    code, out, _ = _run(['verify', '--map', 'poly:0,0,1', '--weight', 'hyperbolic',
                         '--kernel', 'geometric-mean', '--json'] + SMALL)
    assert code == 0
    payload = json.loads(out)
    assert payload['verdict'] == 'pass'
    assert payload['bloch'] == pytest.approx(0.7698, abs=1e-2)
    assert payload['lipschitz'] == pytest.approx(0.7698, abs=1e-2)


def test_verify_fails_with_a_scaled_kernel():
    code, out, _ = _run(['verify', '--map', 'poly:0,0,1', '--weight', 'hyperbolic',
                         '--kernel', 'min', '--kernel-scale', '2', '--json'] + SMALL)
    assert code == 1
    assert json.loads(out)['verdict'] == 'fail'


def test_json_output_is_reproducible():
    argv = ['seminorm', '--map', 'atanh', '--weight', 'hyperbolic', '--kind', 'lipschitz',
            '--kernel', 'min', '--sampler', 'low-discrepancy', '--count', '300', '--seed', '3',
            '--json'] + SMALL
    first = _run(argv)
    second = _run(argv)
    assert first[0] == 0
    assert first[1] == second[1]


def test_check_admissible_reports_but_exits_zero():
    code, out, _ = _run(['check-admissible', '--kernel', 'geometric-mean', '--kernel-scale', '2',
                         '--weight', 'hyperbolic', '--pairs', '200', '--json'])
    assert code == 0
    payload = json.loads(out)
    assert payload['verdict']['W2'] == 'fail'
    assert payload['passed'] is False


def test_environment_precision_and_flag_precedence():
    argv = ['distance', '--weight', 'hyperbolic', '--from', '0,0', '--to', '0.5,0', '--exact', '--json']
    _, out, _ = _run(argv, {'WBL_PRECISION': '3'})
    assert json.loads(out)['value'] == 0.549
    _, out, _ = _run(argv + ['--precision', '5'], {'WBL_PRECISION': '3'})
    assert json.loads(out)['value'] == 0.54931


def test_malformed_environment_is_a_usage_error():
    code, _, err = _run(['catalog'], {'WBL_SEED': 'x'})
    assert code == 2
    assert 'WBL_SEED' in err


def test_catalog_listing_and_evaluation():
    code, out, _ = _run(['catalog', '--json'])
    assert code == 0
    names = [m['name'] for m in json.loads(out)['maps']]
    assert {'identity', 'poly', 'mobius', 'atanh', 'colonna'} <= set(names)
    code, out, _ = _run(['catalog', '--map', 'poly:0,0,1', '--at', '0.5,0', '--json'])
    assert code == 0
    payload = json.loads(out)
    assert payload['value'] == [0.25, 0.0]
    assert payload['jacobian'] == [[1.0, 0.0], [0.0, 1.0]]


def test_unknown_map_is_a_usage_error():
    code, _, err = _run(['seminorm', '--map', 'banana', '--weight', 'hyperbolic'])
    assert code == 2
    assert 'banana' in err


def test_distance_json_keys():
    _, out, _ = _run(['distance', '--weight', 'hyperbolic', '--from', '0,0', '--to', '0.5,0',
                      '--exact', '--json'])
    assert set(json.loads(out)) == {'value', 'method', 'weight'}
    _, out, _ = _run(['distance', '--weight', 'hyperbolic', '--from', '0,0', '--to', '0.5,0',
                      '--control-points', '5', '--json'])
    payload = json.loads(out)
    assert set(payload) == {'value', 'converged', 'iterations', 'path', 'euclidean_length',
                            'flags', 'method', 'weight'}
    assert payload['euclidean_length'] == pytest.approx(0.5, rel=1e-9)


def test_seminorm_json_keys():
    code, out, _ = _run(['seminorm', '--map', 'atanh', '--weight', 'hyperbolic', '--json'] + SMALL)
    assert code == 0
    payload = json.loads(out)
    assert set(payload) == {'kind', 'value', 'witness', 'samples_used', 'skipped', 'flags',
                            'sampling', 'map', 'weight'}
    assert set(payload['sampling']) == {'strategy', 'seed', 'boundary_margin', 'pair_budget',
                                        'near_diagonal', 'resolution'}


def test_check_admissible_json_keys():
    code, out, _ = _run(['check-admissible', '--kernel', 'min', '--weight', 'hyperbolic',
                         '--pairs', '100', '--json'])
    assert code == 0
    payload = json.loads(out)
    assert set(payload) == {'verdict', 'passed', 'samples_used', 'skipped_pairs', 'violation_counts',
                            'tolerances', 'liminf_profile', 'flags', 'w1_violations', 'w2_violations',
                            'w3_violations', 'w4_violations', 'kernel', 'weight', 'distance'}
    assert [p['radius'] for p in payload['liminf_profile']] == [1e-2, 1e-3, 1e-4]


def test_verify_json_keys():
    _, out, _ = _run(['verify', '--map', 'identity', '--weight', 'hyperbolic', '--kernel', 'min',
                      '--json'] + SMALL)
    payload = json.loads(out)
    assert set(payload) == {'verdict', 'bloch', 'lipschitz', 'difference', 'tolerance', 'checks',
                            'bloch_estimate', 'lipschitz_estimate', 'flags', 'map', 'weight', 'kernel'}
    assert set(payload['checks']) == {'pair_quotients_below_bloch', 'near_diagonal_reaches_bloch'}


def test_catalog_json_keys():
    _, out, _ = _run(['catalog', '--json'])
    assert set(json.loads(out)) == {'maps'}
    _, out, _ = _run(['catalog', '--map', 'atanh', '--json'])
    assert set(json.loads(out)) == {'map', 'dimension_in', 'dimension_out'}
    _, out, _ = _run(['catalog', '--map', 'atanh', '--at', '0.1,0', '--json'])
    assert set(json.loads(out)) == {'map', 'dimension_in', 'dimension_out', 'point', 'value', 'jacobian'}


def test_argument_errors_go_to_the_given_stream():
    code, out, err = _run(['verify', '--map', 'identity'])
    assert code == 2
    assert out == ''
    assert 'required' in err
    code, out, _ = _run(['--help'])
    assert code == 0
    assert out.startswith('usage:')


def test_solver_runs_get_a_smaller_default_sampling():
    parser = build_parser()
    args = parser.parse_args(['verify', '--map', 'identity', '--weight', 'hyperbolic', '--kernel', 'canonical'])
    budget = _solver_budget(args, _settings(args, {}))
    assert budget['resolution'] == SOLVER_RESOLUTION
    assert budget['pairs'] == SOLVER_PAIRS
    args = parser.parse_args(['verify', '--map', 'identity', '--weight', 'hyperbolic', '--kernel', 'canonical',
                              '--resolution', '80'])
    budget = _solver_budget(args, _settings(args, {'WBL_PAIRS': '5000'}))
    assert budget['resolution'] == 80
    assert budget['pairs'] == 5000


def test_canonical_verify_warns_about_solves():
    code, out, err = _run(['verify', '--map', 'identity', '--weight', 'hyperbolic', '--kernel', 'canonical',
                           '--resolution', '2', '--pairs', '5', '--control-points', '5', '--json'])
    assert code in (0, 1)
    assert 'geodesic solves' in err
    assert json.loads(out)['lipschitz_estimate']['sampling']['resolution'] == 2
