# coding: utf-8
import io
import json

import numpy as np
import pandas as pd
import pytest

from polyslice.harness import (CHECKS, FAIL, NOT_APPLICABLE, PASS, SAMPLERS,
                               SweepConfig, asymptotic_extremiser_scan,
                               lipschitz_scan, near_extremiser_scan, psi_scan,
                               sample_directions, sweep, to_jsonable)
from polyslice.volume import QuadratureConfig

SMALL = SweepConfig(n_values=(2, 3, 4), directions_per_n=3, seed=1, n_jobs=1)


@pytest.fixture(scope='module')
def report():
    return sweep(SMALL)


def test_sweep_passes(report):
    assert report.passed, report.failures
    assert len(report.records) == 9
    assert [record.index for record in report.records] == list(range(9))


def test_every_check_recorded(report):
    for record in report.records:
        assert tuple(record.checks) == CHECKS
        assert record.primary is not None
    counts = report.check_counts()
    assert all(sum(count.values()) == 9 for count in counts.values())
    assert counts['engine_agreement'][NOT_APPLICABLE] == 9
    assert counts['delta_identity'][PASS] == 9


def test_two_dim_deficit_only_for_n2(report):
    for record in report.records:
        status = record.checks['two_dim_deficit'].status
        assert (status == PASS) if record.n == 2 else (status == NOT_APPLICABLE)


def test_sweep_json_deterministic(report):
    again = sweep(SMALL)
    assert report.to_json() == again.to_json()
    document = json.loads(report.to_json())
    assert document['summary']['passed']
    assert 'runtime_s' not in document['summary']
    assert 'runtime_s' in json.loads(report.to_json(include_timing=True))['summary']


def test_sweep_threads_match_serial(report):
    threaded = sweep(SweepConfig(n_values=(2, 3, 4), directions_per_n=3, seed=1,
                                 n_jobs=2))
    assert threaded.to_json() == report.to_json()


def test_sweep_csv(report):
    frame = pd.read_csv(io.StringIO(report.to_csv()))
    assert len(frame) == 9 * len(CHECKS)
    assert list(frame.columns[:3]) == ['index', 'n', 'direction']


def test_inject_failure():
    failing = sweep(SweepConfig(n_values=(3,), directions_per_n=2, seed=1,
                                inject_failure=True, n_jobs=1))
    assert not failing.passed
    assert {name for _, name in failing.failures} == {'theorem1'}
    assert all(record.checks['theorem1'].status == FAIL
               for record in failing.records)


def test_sweep_with_monte_carlo():
    report = sweep(SweepConfig(n_values=(3,), directions_per_n=2, seed=2,
                               mc_samples=20000, check_product_bound=False,
                               n_jobs=1))
    for record in report.records:
        assert set(record.engines) >= {'monte_carlo'}
        assert record.checks['engine_agreement'].status != NOT_APPLICABLE
        assert record.checks['fourier_product'].status == NOT_APPLICABLE
    assert report.statistical_rates()['engine_agreement'] is not None


@pytest.mark.parametrize('sampler', SAMPLERS)
def test_samplers(sampler):
    cfg = SweepConfig(n_values=(2, 5), directions_per_n=4, sampler=sampler)
    pairs = sample_directions(cfg)
    assert 0 < len(pairs) <= 8
    for n, a in pairs:
        assert a.n == n
        assert list(a.weights) == sorted(a.weights, reverse=True)
    assert pairs == sample_directions(cfg)


def test_samplers_depend_on_seed():
    first = sample_directions(SweepConfig(n_values=(4,), directions_per_n=3, seed=0))
    second = sample_directions(SweepConfig(n_values=(4,), directions_per_n=3, seed=1))
    assert first != second


@pytest.mark.parametrize('kwargs', [{'n_values': ()},
                                    {'n_values': (1, 3)},
                                    {'directions_per_n': 0},
                                    {'sampler': 'lattice'},
                                    {'seed': -1},
                                    {'mc_samples': -5}])
def test_sweep_config_errors(kwargs):
    with pytest.raises(ValueError):
        SweepConfig(**kwargs)


def test_sweep_config_from_mapping():
    cfg = SweepConfig.from_mapping({'n_values': [2, 3], 'seed': 4,
                                    'quadrature': {'abs_tol': 1e-6}})
    assert cfg.n_values == (2, 3)
    assert cfg.engine_tolerances == QuadratureConfig(abs_tol=1e-6)
    with pytest.raises(ValueError, match='Unknown'):
        SweepConfig.from_mapping({'dimensions': [3]})
    with pytest.raises(ValueError, match='quadrature'):
        SweepConfig.from_mapping({'quadrature': {'tolerance': 1e-6}})


def test_to_jsonable_encodes_non_finite():
    document = to_jsonable({'a': {'b': float('inf')}, 'c': np.float64(1.5)})
    assert document == {'a': {'b': 'inf'}, 'c': 1.5}
    assert isinstance(document['c'], float)


# Scans
# -----
def test_asymptotic_extremiser_scan():
    result = asymptotic_extremiser_scan()
    assert result.passed, result.notes
    assert list(result.table['n']) == [16, 32, 64]
    assert (result.table['deficit'] > 0).all()


def test_asymptotic_extremiser_scan_oracle():
    result = asymptotic_extremiser_scan((3, 4, 5))
    assert abs(result.table['oracle_diff'].iloc[0]) <= 1e-7
    with pytest.raises(ValueError):
        asymptotic_extremiser_scan((2, 4))


def test_near_extremiser_scan():
    result = near_extremiser_scan()
    assert result.passed, result.notes
    ratios = result.table['deficit_over_eps']
    assert np.allclose(ratios, 4 / (1 + 2 * result.table['epsilon']))
    with pytest.raises(ValueError):
        near_extremiser_scan([0.5])


def test_psi_scan():
    result = psi_scan(np.linspace(2., 20., 7))
    assert result.passed, result.notes
    assert len(result.table) == 7
    document = json.loads(result.to_json())
    assert document['scan'] == 'psi'
    with pytest.raises(ValueError):
        psi_scan([1.5])


def test_lipschitz_scan():
    result = lipschitz_scan(n=3, pairs=6)
    assert result.passed, result.notes
    assert (result.table['difference'] <= result.table['bound'] + 1e-9).all()
    assert len(result.to_csv().splitlines()) == 7
