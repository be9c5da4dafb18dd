# coding: utf-8
"""
polyslice - Section volumes of the polydisc, explicit bounds and verification
sweeps.
"""
import json
import logging
import math
import sys

import colorama as _C
import numpy as np
import pandas as pd
import path_helpers as ph

from argparse import ArgumentParser, ArgumentTypeError
from collections import OrderedDict
from dataclasses import replace
from typing import List, Optional

import polyslice as ps

from .bounds import classify_region, stability_bounds
from .config import default_psi_config, default_quadrature_config, load_sweep_config
from .harness import (SAMPLERS, SLACK_FLOOR, SweepConfig,
                      asymptotic_extremiser_scan, lipschitz_scan,
                      near_extremiser_scan, psi_scan, sweep, to_jsonable)
from .volume import PolysliceError, canonicalize, psi, volume

#: Format of numbers in text output.
NUMBER_FORMAT = '{:#.12g}'

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2


def _float_list(text: str) -> List[float]:
    '''
    Comma-separated floats, or ``start:stop:count`` for an inclusive linear
    grid.
    '''
    try:
        if ':' in text:
            start, stop, count = text.split(':')
            return np.linspace(float(start), float(stop), int(count)).tolist()
        return [float(v) for v in text.split(',') if v.strip()]
    except ValueError:
        raise ArgumentTypeError(f'invalid number list: `{text}`')


def _int_list(text: str) -> List[int]:
    '''
    Comma-separated integers, or ``start:stop`` for an inclusive range.
    '''
    try:
        if ':' in text:
            start, stop = text.split(':')
            return list(range(int(start), int(stop) + 1))
        return [int(v) for v in text.split(',') if v.strip()]
    except ValueError:
        raise ArgumentTypeError(f'invalid integer list: `{text}`')


def _positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ArgumentTypeError(f'invalid number: `{text}`')
    if not value > 0 or not math.isfinite(value):
        raise ArgumentTypeError(f'must be positive and finite (got `{text}`)')
    return value


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise ArgumentTypeError(f'invalid integer: `{text}`')
    if value < 1:
        raise ArgumentTypeError(f'must be at least 1 (got `{text}`)')
    return value


def _nonnegative_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise ArgumentTypeError(f'invalid integer: `{text}`')
    if value < 0:
        raise ArgumentTypeError(f'must be nonnegative (got `{text}`)')
    return value


BASE_PARSER = ArgumentParser(add_help=False)
BASE_PARSER.add_argument('--format', choices=['text', 'json', 'csv'],
                         default='text', help='Output format '
                         '(default=`%(default)s`).')
BASE_PARSER.add_argument('--out', type=ph.path, default=None,
                         help='Write output to file instead of stdout.')
BASE_PARSER.add_argument('-v', '--verbose', action='store_true')

DIRECTION_PARSER = ArgumentParser(add_help=False)
DIRECTION_PARSER.add_argument('--direction', type=_float_list, required=True,
                              help='Comma-separated coordinates, e.g., '
                              '`0.8,0.6`.')

TOL_PARSER = ArgumentParser(add_help=False)
TOL_PARSER.add_argument('--tol', type=_positive_float, default=None,
                        help='Absolute tolerance.')

SEED_PARSER = ArgumentParser(add_help=False)
SEED_PARSER.add_argument('--seed', type=_nonnegative_int, default=None,
                         help='Nonnegative random seed.')


def _notice(label: str, value: str = '', colour: str = _C.Fore.MAGENTA):
    print(f'{colour}{label}', f'{_C.Fore.WHITE}{value}{_C.Style.RESET_ALL}',
          file=sys.stderr)


def _format_value(value) -> str:
    if isinstance(value, float):
        return NUMBER_FORMAT.format(value)
    if isinstance(value, (list, tuple)):
        return ','.join(_format_value(v) for v in value)
    return str(value)


def _render(record: 'OrderedDict', fmt: str) -> str:
    if fmt == 'json':
        return json.dumps(to_jsonable(dict(record)), indent=2, sort_keys=True)
    if fmt == 'csv':
        flat = {key: (';'.join(repr(v) for v in value)
                      if isinstance(value, (list, tuple)) else value)
                for key, value in record.items()}
        return pd.DataFrame([flat]).to_csv(index=False)
    return '\n'.join(f'{key}: {_format_value(value)}'
                     for key, value in record.items())


def _render_table(result, fmt: str) -> str:
    if fmt == 'json':
        return result.to_json()
    if fmt == 'csv':
        return result.to_csv()
    return result.table.to_string(index=False, float_format=NUMBER_FORMAT.format)


def _emit(text: str, out: Optional[ph.path]):
    if not text.endswith('\n'):
        text += '\n'
    if out is None:
        sys.stdout.write(text)
        return
    out = ph.path(out)
    if out.parent and not out.parent.isdir():
        out.parent.makedirs_p()
    out.write_text(text, linesep='\n')
    _notice('Wrote:', out)


def _direction(parser: ArgumentParser, raw: List[float]):
    try:
        direction = canonicalize(raw)
    except PolysliceError as exception:
        parser.error(f'argument --direction: {exception}')
    if list(direction.weights) != [float(v) for v in raw]:
        _notice('Canonicalized direction:', _format_value(list(direction.weights)))
    return direction


def _quadrature_config(args, default):
    return default if args.tol is None else default.with_tol(args.tol)


def _command_volume(parser, args) -> int:
    a = _direction(parser, args.direction)
    estimate = volume(a, method=args.method,
                      cfg=_quadrature_config(args, default_quadrature_config()),
                      samples=args.samples, seed=args.seed or 0)
    record = OrderedDict([('direction', list(a.weights)),
                          ('value', estimate.value),
                          ('error', estimate.error),
                          ('method', estimate.method.value),
                          ('route', estimate.route),
                          ('samples_or_panels', estimate.samples_or_panels)])
    _emit(_render(record, args.format), args.out)
    return EXIT_OK


def _command_psi(parser, args) -> int:
    value = psi(args.s, _quadrature_config(args, default_psi_config()))
    record = OrderedDict([('s', value.s), ('value', value.value),
                          ('error', value.error), ('route', value.route),
                          ('panels', value.panels)])
    _emit(_render(record, args.format), args.out)
    return EXIT_OK


def _command_classify(parser, args) -> int:
    a = _direction(parser, args.direction)
    regions = classify_region(a)
    record = OrderedDict([('direction', list(a.weights)),
                          ('delta', regions.delta),
                          ('regions', [tag.value for tag in regions.tags])])
    for tag, bound in regions.bounds.items():
        record[f'bound_{tag.value}'] = bound
    record['direct_bound'] = regions.direct_bound
    record['minimum'] = regions.minimum
    _emit(_render(record, args.format), args.out)
    return EXIT_OK


def _command_bounds(parser, args) -> int:
    a = _direction(parser, args.direction)
    cfg = _quadrature_config(args, default_quadrature_config())
    bounds = stability_bounds(a, default_psi_config())
    estimate = volume(a, method='auto', cfg=cfg)
    slack = estimate.error + SLACK_FLOOR
    checks = OrderedDict([
        ('theorem1', estimate.value <= bounds.upper_thm1 + slack),
        ('lower_stability', estimate.value >= bounds.lower_stab - slack),
        ('fourier_product', estimate.value <= bounds.fourier_product + slack)])
    record = OrderedDict([('direction', list(a.weights)),
                          ('value', estimate.value),
                          ('error', estimate.error)])
    record.update(bounds.as_dict())
    record.update((f'check_{name}', 'pass' if ok else 'fail')
                  for name, ok in checks.items())
    _emit(_render(record, args.format), args.out)
    if not all(checks.values()):
        _notice('Bound violated:', ', '.join(name for name, ok in checks.items()
                                             if not ok), _C.Fore.RED)
        return EXIT_FAILED
    return EXIT_OK


def _sweep_config(args) -> SweepConfig:
    cfg = load_sweep_config(args.config) if args.config else SweepConfig()
    overrides = {}
    if args.n is not None:
        overrides['n_values'] = tuple(args.n)
    if args.directions is not None:
        overrides['directions_per_n'] = args.directions
    if args.sampler is not None:
        overrides['sampler'] = args.sampler
    if args.seed is not None:
        overrides['seed'] = args.seed
    if args.samples is not None:
        overrides['mc_samples'] = args.samples
    if args.tol is not None:
        overrides['engine_tolerances'] = cfg.engine_tolerances.with_tol(args.tol)
    if args.inject_failure:
        overrides['inject_failure'] = True
    return replace(cfg, **overrides)


def _command_sweep(parser, args) -> int:
    try:
        cfg = _sweep_config(args)
    except ValueError as exception:
        parser.error(str(exception))
    report = sweep(cfg)
    if args.format == 'json':
        text = report.to_json(include_timing=args.timing)
    elif args.format == 'csv':
        text = report.to_csv()
    else:
        summary = report.summary(include_timing=args.timing)
        lines = [f'records: {summary["records"]}',
                 f'passed: {summary["passed"]}']
        for name, counts in summary['checks'].items():
            worst = summary['worst_margins'][name]
            lines.append(f'{name}: ' + ' '.join(f'{status}={count}' for status,
                                                count in counts.items())
                         + ('' if worst is None else
                            f' worst_margin={NUMBER_FORMAT.format(worst)}'))
        text = '\n'.join(lines)
    _emit(text, args.out)
    if report.passed:
        _notice('Sweep passed:', f'{len(report.records)} directions',
                _C.Fore.GREEN)
        return EXIT_OK
    _notice('Sweep failed:', f'{len(report.failures)} failed checks',
            _C.Fore.RED)
    return EXIT_FAILED


def _finish_scan(result, args) -> int:
    _emit(_render_table(result, args.format), args.out)
    if result.passed:
        return EXIT_OK
    _notice('Scan failed:', '; '.join(result.notes), _C.Fore.RED)
    return EXIT_FAILED


def _command_scan_asymptotic(parser, args) -> int:
    cfg = _quadrature_config(args, default_quadrature_config())
    return _finish_scan(asymptotic_extremiser_scan(args.n or (16, 32, 64), cfg),
                        args)


def _command_scan_psi(parser, args) -> int:
    cfg = _quadrature_config(args, default_psi_config())
    return _finish_scan(psi_scan(args.grid, cfg), args)


def _command_scan_near_extremiser(parser, args) -> int:
    return _finish_scan(near_extremiser_scan(args.grid or (0.1, 0.05, 0.01, 0.001)),
                        args)


def _command_scan_lipschitz(parser, args) -> int:
    cfg = _quadrature_config(args, default_quadrature_config())
    return _finish_scan(lipschitz_scan(args.n, args.pairs, seed=args.seed or 0,
                                       cfg=cfg), args)


COMMANDS = OrderedDict([('volume', _command_volume),
                        ('psi', _command_psi),
                        ('classify', _command_classify),
                        ('bounds', _command_bounds),
                        ('sweep', _command_sweep),
                        ('scan-asymptotic', _command_scan_asymptotic),
                        ('scan-psi', _command_scan_psi),
                        ('scan-near-extremiser', _command_scan_near_extremiser),
                        ('scan-lipschitz', _command_scan_lipschitz)])


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(prog='polyslice', epilog=f'Version {ps.__version__}',
                            description='Central hyperplane sections of the '
                            'polydisc: section volumes, explicit bounds and '
                            'verification sweeps.')
    parser.add_argument('--version', action='store_true')
    sub = parser.add_subparsers(dest='command')

    volume_parser = sub.add_parser('volume', parents=[BASE_PARSER,
                                                      DIRECTION_PARSER,
                                                      TOL_PARSER, SEED_PARSER],
                                   help='Section volume A_n(a).')
    volume_parser.add_argument('--method', choices=['quad', 'mc', 'closed',
                                                    'auto'], default='auto')
    volume_parser.add_argument('--samples', type=_positive_int, default=100000,
                               help='Monte Carlo samples (default=`%(default)s`).')

    psi_parser = sub.add_parser('psi', parents=[BASE_PARSER, TOL_PARSER],
                                help='Special function Psi(s).')
    psi_parser.add_argument('--s', type=float, required=True)

    sub.add_parser('classify', parents=[BASE_PARSER, DIRECTION_PARSER],
                   help='Regions containing a direction and their bounds.')
    sub.add_parser('bounds', parents=[BASE_PARSER, DIRECTION_PARSER, TOL_PARSER],
                   help='Explicit bounds at a direction, checked against the '
                   'section volume.')

    sweep_parser = sub.add_parser('sweep', parents=[BASE_PARSER, TOL_PARSER,
                                                    SEED_PARSER],
                                  help='Check every bound over sampled '
                                  'directions.')
    sweep_parser.add_argument('--n', type=_int_list, default=None,
                              help='Dimensions, e.g., `3,4,5` or `3:8`.')
    sweep_parser.add_argument('--directions', type=_positive_int, default=None,
                              help='Directions per dimension.')
    sweep_parser.add_argument('--sampler', choices=SAMPLERS, default=None)
    sweep_parser.add_argument('--samples', type=_nonnegative_int, default=None,
                              help='Additional Monte Carlo samples per '
                              'direction.')
    sweep_parser.add_argument('--config', type=ph.path, default=None,
                              help='YAML sweep configuration.')
    sweep_parser.add_argument('--inject-failure', action='store_true',
                              help='Lower the main upper bound by one (tests '
                              'the failure path).')
    sweep_parser.add_argument('--timing', action='store_true',
                              help='Include run times in JSON output.')

    asymptotic_parser = sub.add_parser('scan-asymptotic',
                                       parents=[BASE_PARSER, TOL_PARSER],
                                       help='A_n at the uniform direction.')
    asymptotic_parser.add_argument('--n', type=_int_list, default=None)

    psi_scan_parser = sub.add_parser('scan-psi', parents=[BASE_PARSER,
                                                          TOL_PARSER],
                                     help='Psi(s) against its bounds.')
    psi_scan_parser.add_argument('--grid', type=_float_list, default=None,
                                 help='Exponents, e.g., `2:60:60`.')

    near_parser = sub.add_parser('scan-near-extremiser', parents=[BASE_PARSER],
                                 help='A_2 near (e_1 + e_2) / sqrt(2).')
    near_parser.add_argument('--grid', type=_float_list, default=None,
                             help='Values of eps in (0, 1/2).')

    lipschitz_parser = sub.add_parser('scan-lipschitz',
                                      parents=[BASE_PARSER, TOL_PARSER,
                                               SEED_PARSER],
                                      help='Lipschitz bound on random pairs.')
    lipschitz_parser.add_argument('--n', type=_positive_int, default=4)
    lipschitz_parser.add_argument('--pairs', type=_positive_int, default=20)
    return parser


def main(args: Optional[List[str]] = None) -> int:
    if args is None:
        args = sys.argv[1:]

    parser = build_parser()
    args = parser.parse_args(args)

    if args.version:
        print(ps.__version__)
        return EXIT_OK

    if not args.command:
        parser.error(f"No command specified.  Must specify one of: "
                     f"`{', '.join(COMMANDS.keys())}`")

    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    _C.init()
    try:
        return COMMANDS[args.command](parser, args)
    except PolysliceError as exception:
        _notice(f'{type(exception).__name__}:', str(exception), _C.Fore.RED)
        return EXIT_USAGE
    except ValueError as exception:
        # Invalid configuration, e.g., `POLYSLICE_THREADS`.
        _notice('Error:', str(exception), _C.Fore.RED)
        return EXIT_USAGE
    finally:
        _C.deinit()


if __name__ == '__main__':
    sys.exit(main())
