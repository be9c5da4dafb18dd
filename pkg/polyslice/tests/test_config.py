# coding: utf-8
import pytest

import polyslice as ps

from polyslice._version import FALLBACK_VERSION, get_versions
from polyslice.config import (THREADS_VARIABLE, default_psi_config,
                              default_quadrature_config, load_sweep_config,
                              read_yaml, threads)
from polyslice.parallel_util import parallel_map, resolve_n_jobs
from polyslice.volume import DEFAULT_PSI_CONFIG, DEFAULT_VOLUME_CONFIG


def test_threads_default(monkeypatch):
    monkeypatch.delenv(THREADS_VARIABLE, raising=False)
    assert threads() == 1
    assert resolve_n_jobs(None) == 1


def test_threads_from_environment(monkeypatch):
    monkeypatch.setenv(THREADS_VARIABLE, '3')
    assert threads() == 3
    assert resolve_n_jobs(None) == 3
    assert resolve_n_jobs(2) == 2


@pytest.mark.parametrize('value', ['0', '-2', 'many'])
def test_threads_invalid(monkeypatch, value):
    monkeypatch.setenv(THREADS_VARIABLE, value)
    with pytest.raises(ValueError, match=THREADS_VARIABLE):
        threads()


def test_parallel_map_keeps_order():
    items = list(range(20))
    assert parallel_map(lambda x: x * x, items, n_jobs=4) == [x * x for x in items]
    assert parallel_map(lambda x: -x, [5], n_jobs=4) == [-5]


def test_read_yaml(tmp_path):
    path = tmp_path.joinpath('empty.yaml')
    path.write_text('')
    assert read_yaml(str(path)) == {}
    path.write_text('- 1\n- 2\n')
    with pytest.raises(ValueError, match='mapping'):
        read_yaml(str(path))


def test_load_sweep_config(tmp_path):
    path = tmp_path.joinpath('sweep.yaml')
    path.write_text('n_values: [3, 4]\nseed: 7\nmc_samples: 1000\n'
                    'psi_quadrature:\n  abs_tol: 1.0e-6\n')
    cfg = load_sweep_config(str(path))
    assert cfg.n_values == (3, 4)
    assert cfg.seed == 7
    assert cfg.mc_samples == 1000
    assert cfg.psi_tolerances.abs_tol == 1e-6
    path.write_text('seeds: 7\n')
    with pytest.raises(ValueError, match='seeds'):
        load_sweep_config(str(path))


def test_default_configs_are_module_constants():
    assert default_quadrature_config() is DEFAULT_VOLUME_CONFIG
    assert default_psi_config() is DEFAULT_PSI_CONFIG
    assert DEFAULT_VOLUME_CONFIG.abs_tol == 1e-8
    assert DEFAULT_PSI_CONFIG.abs_tol == 1e-7


def test_versions():
    versions = get_versions()
    assert versions['version'] == ps.__version__
    assert versions['version'] == FALLBACK_VERSION or versions['error'] is None
