# coding: utf-8
import json

import pytest

import polyslice as ps

from polyslice.__main__ import EXIT_FAILED, EXIT_OK, EXIT_USAGE, main
from polyslice.volume import canonicalize, volume


def _run(capsys, *args):
    code = main(list(args))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_volume_json_matches_library(capsys):
    code, out, _ = _run(capsys, 'volume', '--direction', '0.8,0.6',
                        '--format', 'json')
    assert code == EXIT_OK
    record = json.loads(out)
    assert record['value'] == volume(canonicalize([0.8, 0.6])).value
    assert record['value'] == pytest.approx(1.5625, rel=1e-15)
    assert record['method'] == 'closed_form'


def test_volume_text_canonicalizes(capsys):
    code, out, err = _run(capsys, 'volume', '--direction', '0,-4,3')
    assert code == EXIT_OK
    assert 'value: 1.56250000000' in out
    assert 'Canonicalized direction' in err


def test_volume_monte_carlo_csv(capsys):
    code, out, _ = _run(capsys, 'volume', '--direction', '1,1,1',
                        '--method', 'mc', '--samples', '5000', '--seed', '3',
                        '--format', 'csv')
    assert code == EXIT_OK
    header, row = out.strip().splitlines()
    assert header.split(',')[:2] == ['direction', 'value']
    assert 'monte_carlo' in row


@pytest.mark.parametrize('args', [['volume', '--direction', '0,0'],
                                  ['volume', '--direction', '1,nan'],
                                  ['volume', '--direction', '1,1', '--tol', '-1'],
                                  ['volume', '--direction', 'x'],
                                  ['sweep', '--n', '1']])
def test_usage_errors(capsys, args):
    with pytest.raises(SystemExit) as exception:
        main(args)
    assert exception.value.code == EXIT_USAGE


def test_closed_method_unavailable(capsys):
    code, _, err = _run(capsys, 'volume', '--direction', '4,3,2,1',
                        '--method', 'closed')
    assert code == EXIT_USAGE
    assert 'DimensionMismatch' in err


def test_psi(capsys):
    code, out, _ = _run(capsys, 'psi', '--s', '2', '--format', 'json')
    assert code == EXIT_OK
    assert json.loads(out)['value'] == pytest.approx(1., abs=1e-6)


def test_psi_domain_error(capsys):
    code, _, err = _run(capsys, 'psi', '--s', '1')
    assert code == EXIT_USAGE
    assert 'DomainError' in err


def test_classify(capsys):
    code, out, _ = _run(capsys, 'classify', '--direction', '1,0',
                        '--format', 'json')
    assert code == EXIT_OK
    record = json.loads(out)
    assert record['regions'] == ['L13']
    assert record['direct_bound'] == 1.


def test_bounds(capsys):
    code, out, _ = _run(capsys, 'bounds', '--direction', '1,1,1,1',
                        '--format', 'json')
    assert code == EXIT_OK
    record = json.loads(out)
    assert record['check_theorem1'] == 'pass'
    assert record['lower_stability'] == 1.25


def test_sweep(capsys):
    code, out, _ = _run(capsys, 'sweep', '--n', '2:3', '--directions', '2',
                        '--seed', '5')
    assert code == EXIT_OK
    assert 'passed: True' in out


def test_sweep_inject_failure(capsys):
    code, out, err = _run(capsys, 'sweep', '--n', '3', '--directions', '2',
                          '--inject-failure', '--format', 'json')
    assert code == EXIT_FAILED
    assert not json.loads(out)['summary']['passed']
    assert 'Sweep failed' in err


def test_sweep_config_file(capsys, tmp_path):
    config = tmp_path.joinpath('sweep.yaml')
    config.write_text('n_values: [2]\ndirections_per_n: 2\nsampler: grid_2d\n')
    code, out, _ = _run(capsys, 'sweep', '--config', str(config),
                        '--format', 'json')
    assert code == EXIT_OK
    summary = json.loads(out)['summary']
    assert summary['n_values'] == [2]
    assert summary['sampler'] == 'grid_2d'


def test_out_writes_file(capsys, tmp_path):
    target = tmp_path.joinpath('results', 'near.csv')
    code, out, err = _run(capsys, 'scan-near-extremiser', '--format', 'csv',
                          '--out', str(target))
    assert code == EXIT_OK
    assert out == ''
    assert 'Wrote:' in err
    lines = target.read_text().splitlines()
    assert lines[0].startswith('epsilon,')
    assert len(lines) == 5


def test_scan_psi(capsys):
    code, out, _ = _run(capsys, 'scan-psi', '--grid', '2:10:5',
                        '--format', 'json')
    assert code == EXIT_OK
    assert len(json.loads(out)['rows']) == 5


def test_version(capsys):
    code, out, _ = _run(capsys, '--version')
    assert code == EXIT_OK
    assert out.strip() == ps.__version__


def test_no_command():
    with pytest.raises(SystemExit) as exception:
        main([])
    assert exception.value.code == EXIT_USAGE
