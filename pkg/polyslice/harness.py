# coding: utf-8
"""
Verification sweeps over sampled directions and the numerical scans.

A sweep evaluates, for every sampled direction, the section volume and every
bound of :mod:`polyslice.bounds`, and records one check per inequality with
status ``pass``, ``fail`` or ``not_applicable``.  Scans tabulate one
quantity over a grid (dimension, exponent, distance to the extremiser).

.. versionadded:: 0.1.0
"""
import json
import logging
import math
import time

from dataclasses import dataclass, field, fields
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
import pydash as _py

from .bounds import (LIPSCHITZ_CONSTANT, NEAR_EXTREMISER_DELTA, RegionAssignment,
                     aggregated_upper, classify_region, delta,
                     fourier_product_upper, lipschitz_check, lower_stability,
                     psi_quantitative_bound, theorem1_upper,
                     two_dim_deficit_holds)
from .parallel_util import parallel_map
from .volume import (DEFAULT_PSI_CONFIG, DEFAULT_VOLUME_CONFIG, Direction,
                     Method, PolysliceError, QuadratureConfig, VolumeEstimate,
                     canonicalize, psi, volume_auto, volume_closed_form_n3,
                     volume_monte_carlo, volume_quadrature)

__all__ = ['SAMPLERS', 'CHECKS', 'PASS', 'FAIL', 'NOT_APPLICABLE',
           'SweepConfig', 'CheckResult', 'DirectionRecord',
           'VerificationReport', 'ScanResult', 'sample_directions',
           'evaluate_direction', 'sweep', 'asymptotic_extremiser_scan',
           'near_extremiser_scan', 'psi_scan', 'lipschitz_scan',
           'to_jsonable']

logger = logging.getLogger(__name__)

SAMPLERS = ('uniform_sphere', 'dirichlet_squares', 'grid_2d', 'special_vectors')
CHECKS = ('slicing_lower', 'slicing_upper', 'theorem1', 'lower_stability',
          'fourier_product', 'direct_bound', 'region_coverage', 'region_bound',
          'aggregation', 'delta_identity', 'engine_agreement',
          'two_dim_deficit')
PASS, FAIL, NOT_APPLICABLE = 'pass', 'fail', 'not_applicable'

#: Floor of every comparison slack.
SLACK_FLOOR = 1e-6
#: Monte Carlo errors are scaled by this many standard errors.
MC_SIGMAS = 4.
#: Checks judged by their pass rate instead of per record.
STATISTICAL_CHECKS = {'engine_agreement': 0.95}
PRODUCT_BOUND_A1_MAX = math.sqrt(3.) / 2.


def _item_generator(*keys: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(list(keys))))


def _item_seed(*keys: int) -> int:
    return int(np.random.SeedSequence(list(keys)).generate_state(1)[0])


@dataclass(frozen=True)
class SweepConfig:
    '''
    Attributes
    ----------
    n_values : tuple of int
        Dimensions to sweep (each at least 2).
    directions_per_n : int
        Directions sampled per dimension.
    sampler : str
        One of :data:`SAMPLERS`.
    seed : int
        Nonnegative seed; every direction has its own stream keyed by
        ``(seed, n, index)``.
    engine_tolerances : QuadratureConfig
        Section volume quadrature configuration.
    mc_samples : int
        Monte Carlo samples per direction in addition to the primary engine
        (``0`` disables).
    psi_tolerances : QuadratureConfig
        Configuration of ``Psi`` for the product bound.
    n_jobs : int, optional
        Worker threads (default from ``POLYSLICE_THREADS``).
    fallback_mc_samples : int
        Samples drawn when the primary engine fails.
    inject_failure : bool
        Lower the main upper bound by one, so that every record fails.
    check_product_bound : bool
        Evaluate the Fourier product bound.
    '''
    n_values: Tuple[int, ...] = (3, 4, 5)
    directions_per_n: int = 10
    sampler: str = 'uniform_sphere'
    seed: int = 0
    engine_tolerances: QuadratureConfig = DEFAULT_VOLUME_CONFIG
    mc_samples: int = 0
    psi_tolerances: QuadratureConfig = DEFAULT_PSI_CONFIG
    n_jobs: Optional[int] = None
    fallback_mc_samples: int = 100000
    inject_failure: bool = False
    check_product_bound: bool = True

    def __post_init__(self):
        object.__setattr__(self, 'n_values', tuple(int(n) for n in self.n_values))
        if not self.n_values:
            raise ValueError('At least one dimension is required.')
        if min(self.n_values) < 2:
            raise ValueError(f'Dimensions must be at least 2 (got {self.n_values}).')
        if self.directions_per_n < 1:
            raise ValueError('`directions_per_n` must be at least 1 (got '
                             f'{self.directions_per_n}).')
        if self.sampler not in SAMPLERS:
            raise ValueError(f'Unknown sampler `{self.sampler}` (expected one '
                             f'of {", ".join(SAMPLERS)}).')
        if self.seed < 0:
            raise ValueError(f'Seed must be nonnegative (got {self.seed}).')
        if self.mc_samples < 0 or self.fallback_mc_samples < 1:
            raise ValueError('Invalid Monte Carlo sample counts.')

    @classmethod
    def from_mapping(cls, document: dict) -> 'SweepConfig':
        '''
        Build from a plain mapping, e.g., a decoded YAML document.

        Nested ``quadrature`` and ``psi_quadrature`` mappings configure
        ``engine_tolerances`` and ``psi_tolerances``.
        '''
        document = dict(document)
        nested = {'quadrature': 'engine_tolerances',
                  'psi_quadrature': 'psi_tolerances'}
        known = ({f.name for f in fields(cls)} - set(nested.values())) | set(nested)
        unknown = sorted(set(document) - known)
        if unknown:
            raise ValueError(f'Unknown sweep configuration keys: {", ".join(unknown)}.')
        for key, attribute in nested.items():
            if key in document:
                try:
                    document[attribute] = QuadratureConfig(**document.pop(key))
                except TypeError as exception:
                    raise ValueError(f'Invalid `{key}` mapping: {exception}')
        return cls(**document)


@dataclass(frozen=True)
class CheckResult:
    status: str
    margin: Optional[float] = None
    note: str = ''

    def as_dict(self) -> dict:
        return {'status': self.status, 'margin': self.margin, 'note': self.note}


@dataclass
class DirectionRecord:
    index: int
    n: int
    direction: Direction
    engines: Dict[str, VolumeEstimate] = field(default_factory=dict)
    primary: Optional[str] = None
    bounds: Dict[str, Optional[float]] = field(default_factory=dict)
    regions: Optional[RegionAssignment] = None
    checks: Dict[str, CheckResult] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)
    runtime: float = 0.

    @property
    def estimate(self) -> Optional[VolumeEstimate]:
        return self.engines.get(self.primary)

    def as_dict(self, include_timing: bool = False) -> dict:
        record = {'index': self.index,
                  'n': self.n,
                  'direction': list(self.direction.weights),
                  'primary': self.primary,
                  'engines': {name: estimate.as_dict()
                              for name, estimate in self.engines.items()},
                  'bounds': dict(self.bounds),
                  'regions': self.regions.as_dict() if self.regions else None,
                  'checks': {name: check.as_dict()
                             for name, check in self.checks.items()},
                  'notes': list(self.notes)}
        if include_timing:
            record['runtime_s'] = self.runtime
        return record


def _encode_value(value):
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return repr(value)
    return value


def to_jsonable(document: dict) -> dict:
    # JSON has no literal for non-finite floats.
    return _py.map_values_deep(document, _encode_value)


@dataclass
class VerificationReport:
    config: SweepConfig
    records: List[DirectionRecord]
    runtime: float = 0.

    def check_counts(self) -> Dict[str, Dict[str, int]]:
        counts = {name: {PASS: 0, FAIL: 0, NOT_APPLICABLE: 0} for name in CHECKS}
        for record in self.records:
            for name, check in record.checks.items():
                counts[name][check.status] += 1
        return counts

    def worst_margins(self) -> Dict[str, Optional[float]]:
        worst = {}
        for name in CHECKS:
            margins = [record.checks[name].margin for record in self.records
                       if record.checks[name].status != NOT_APPLICABLE
                       and record.checks[name].margin is not None]
            worst[name] = min(margins) if margins else None
        return worst

    def statistical_rates(self) -> Dict[str, Optional[float]]:
        counts = self.check_counts()
        rates = {}
        for name in STATISTICAL_CHECKS:
            judged = counts[name][PASS] + counts[name][FAIL]
            rates[name] = counts[name][PASS] / judged if judged else None
        return rates

    @property
    def failures(self) -> List[Tuple[int, str]]:
        '''
        ``(index, check)`` of every failed deterministic check.
        '''
        return [(record.index, name) for record in self.records
                for name, check in record.checks.items()
                if check.status == FAIL and name not in STATISTICAL_CHECKS]

    @property
    def passed(self) -> bool:
        rates = self.statistical_rates()
        return (not self.failures
                and all(rates[name] is None or rates[name] >= required
                        for name, required in STATISTICAL_CHECKS.items()))

    def summary(self, include_timing: bool = False) -> dict:
        counts = self.check_counts()
        totals = {status: sum(count[status] for count in counts.values())
                  for status in (PASS, FAIL, NOT_APPLICABLE)}
        summary = {'records': len(self.records),
                   'passed': self.passed,
                   'n_values': list(self.config.n_values),
                   'sampler': self.config.sampler,
                   'seed': self.config.seed,
                   'totals': totals,
                   'checks': counts,
                   'worst_margins': self.worst_margins(),
                   'statistical_rates': self.statistical_rates()}
        if include_timing:
            summary['runtime_s'] = self.runtime
        return summary

    def to_dict(self, include_timing: bool = False) -> dict:
        return {'summary': self.summary(include_timing),
                'records': [record.as_dict(include_timing)
                            for record in self.records]}

    def to_json(self, include_timing: bool = False) -> str:
        '''
        Returns
        -------
        str
            JSON document with sorted keys.  Byte-identical across runs with
            the same configuration when ``include_timing`` is ``False``.
        '''
        return json.dumps(to_jsonable(self.to_dict(include_timing)), indent=2,
                          sort_keys=True)

    def to_frame(self) -> pd.DataFrame:
        '''
        Returns
        -------
        pandas.DataFrame
            One row per direction and check.
        '''
        rows = []
        for record in self.records:
            estimate = record.estimate
            for name in CHECKS:
                check = record.checks[name]
                rows.append({'index': record.index,
                             'n': record.n,
                             'direction': ';'.join(repr(w) for w in
                                                   record.direction.weights),
                             'a1': record.direction.a1,
                             'a2': record.direction.a2,
                             'delta': delta(record.direction),
                             'value': estimate.value if estimate else None,
                             'error': estimate.error if estimate else None,
                             'method': record.primary,
                             'check': name,
                             'status': check.status,
                             'margin': check.margin,
                             'note': check.note})
        return pd.DataFrame(rows, columns=['index', 'n', 'direction', 'a1',
                                           'a2', 'delta', 'value', 'error',
                                           'method', 'check', 'status',
                                           'margin', 'note'])

    def to_csv(self) -> str:
        return self.to_frame().to_csv(index=False)


@dataclass
class ScanResult:
    name: str
    table: pd.DataFrame
    passed: bool
    notes: List[str] = field(default_factory=list)

    def to_json(self) -> str:
        document = {'scan': self.name, 'passed': self.passed,
                    'notes': list(self.notes),
                    'rows': self.table.to_dict(orient='records')}
        return json.dumps(to_jsonable(document), indent=2, sort_keys=True)

    def to_csv(self) -> str:
        return self.table.to_csv(index=False)


# Samplers
# --------
def _uniform_sphere(n: int, count: int, seed: int) -> List[Direction]:
    directions = []
    for i in range(count):
        rng = _item_generator(seed, n, i)
        g = rng.standard_normal(n)
        while not np.any(g):
            g = rng.standard_normal(n)
        directions.append(canonicalize(g))
    return directions


def _dirichlet_squares(n: int, count: int, seed: int) -> List[Direction]:
    # Squared weights uniform on the simplex.
    return [canonicalize(np.sqrt(_item_generator(seed, n, i).dirichlet(np.ones(n))))
            for i in range(count)]


def _grid_2d(n: int, count: int, seed: int) -> List[Direction]:
    '''
    Deterministic grid: ``(sqrt(1/2 + eps), sqrt(1/2 - eps))`` for ``n = 2``;
    for larger ``n`` a grid of feasible ``(a_1, a_2)`` with the remaining mass
    spread evenly over the other coordinates.
    '''
    if n == 2:
        return [canonicalize([math.sqrt(0.5 + eps), math.sqrt(0.5 - eps)])
                for eps in np.linspace(0., 0.49, count)]
    side = int(math.ceil(math.sqrt(2. * count))) + 1
    while True:
        points = []
        for a1 in np.linspace(1. / math.sqrt(n), 1., side):
            for a2 in np.linspace(0., 1. / math.sqrt(2.), side):
                rest2 = 1. - a1 * a1 - a2 * a2
                if a2 > a1 or rest2 < 0:
                    continue
                rest = math.sqrt(rest2 / (n - 2))
                if rest <= a2:
                    points.append([a1, a2] + [rest] * (n - 2))
        if len(points) >= count or side > 4096:
            break
        side *= 2
    chosen = np.unique(np.linspace(0, len(points) - 1, count).round().astype(int))
    return [canonicalize(points[i]) for i in chosen]


def _special_vectors(n: int, count: int, seed: int) -> List[Direction]:
    raw = [[1.] + [0.] * (n - 1),
           [1., 1.] + [0.] * (n - 2),
           [1.] * n]
    if n >= 3:
        raw.append([math.sqrt(0.5)] + [math.sqrt(0.5 / (n - 1))] * (n - 1))
        raw.append([math.sqrt(3. / 8.)] + [math.sqrt(5. / 8. / (n - 1))] * (n - 1))
    raw.append([0.9, math.sqrt(1. - 0.81)] + [0.] * (n - 2))
    raw.append([1., 1e-3] + [1e-3] * (n - 2))
    unique = []
    for direction in (canonicalize(r) for r in raw):
        if direction not in unique:
            unique.append(direction)
    return unique[:count]


_SAMPLER_FUNCTIONS = {'uniform_sphere': _uniform_sphere,
                      'dirichlet_squares': _dirichlet_squares,
                      'grid_2d': _grid_2d,
                      'special_vectors': _special_vectors}


def sample_directions(cfg: SweepConfig) -> List[Tuple[int, Direction]]:
    '''
    Returns
    -------
    list
        ``(n, direction)`` pairs, in order of ``cfg.n_values``.  Deterministic
        given ``cfg.seed``.
    '''
    sampler = _SAMPLER_FUNCTIONS[cfg.sampler]
    return [(n, direction) for n in cfg.n_values
            for direction in sampler(n, cfg.directions_per_n, cfg.seed)]


# Checks
# ------
def _at_most(value: float, bound: float, slack: float) -> CheckResult:
    margin = bound - value
    return CheckResult(PASS if margin >= -slack else FAIL, margin)


def _at_least(value: float, bound: float, slack: float) -> CheckResult:
    margin = value - bound
    return CheckResult(PASS if margin >= -slack else FAIL, margin)


def _slack(estimate: VolumeEstimate) -> float:
    scale = MC_SIGMAS if estimate.method == Method.MONTE_CARLO else 1.
    return scale * estimate.error + SLACK_FLOOR


def _extremiser_distance2(a: Direction) -> float:
    target = [1. / math.sqrt(2.)] * 2 + [0.] * (a.n - 2)
    return math.fsum((x - y) ** 2 for x, y in zip(a.weights, target))


def _engine_agreement(engines: Dict[str, VolumeEstimate]) -> CheckResult:
    mc = engines.get(Method.MONTE_CARLO.value)
    others = [e for name, e in engines.items() if name != Method.MONTE_CARLO.value]
    if mc is None or not others:
        return CheckResult(NOT_APPLICABLE, note='single engine')
    reference = others[0]
    margin = (MC_SIGMAS * mc.error + reference.error + 1e-12
              - abs(mc.value - reference.value))
    return CheckResult(PASS if margin >= 0 else FAIL, margin)


def _product_check(a: Direction, value: float, slack: float,
                   cfg: SweepConfig, bounds: dict) -> CheckResult:
    bounds['fourier_product'] = None
    if not cfg.check_product_bound:
        return CheckResult(NOT_APPLICABLE, note='disabled')
    if a.a1 > PRODUCT_BOUND_A1_MAX:
        return CheckResult(NOT_APPLICABLE, note='a1 > sqrt(3)/2')
    try:
        product = fourier_product_upper(a, cfg.psi_tolerances)
    except PolysliceError as exception:
        return CheckResult(NOT_APPLICABLE,
                           note=f'{type(exception).__name__}: {exception}')
    bounds['fourier_product'] = product
    if not math.isfinite(product):
        return CheckResult(NOT_APPLICABLE, note='weight in slow band')
    return _at_most(value, product, slack)


def evaluate_direction(index: int, n: int, a: Direction,
                       cfg: SweepConfig) -> DirectionRecord:
    '''
    Evaluate every engine and check for one direction.

    Engine failures are recorded as notes; when the primary engine fails, a
    Monte Carlo estimate takes its place.
    '''
    start = time.perf_counter()
    record = DirectionRecord(index=index, n=n, direction=a)
    mc_seed = _item_seed(cfg.seed, n, index)
    try:
        primary = volume_auto(a, cfg.engine_tolerances)
        record.engines[primary.method.value] = primary
    except PolysliceError as exception:
        record.notes.append(f'{type(exception).__name__}: {exception}')
        primary = None
    if cfg.mc_samples > 0:
        mc = volume_monte_carlo(a, cfg.mc_samples, seed=mc_seed, n_jobs=1)
        record.engines[mc.method.value] = mc
        primary = primary or mc
    if primary is None:
        primary = volume_monte_carlo(a, cfg.fallback_mc_samples, seed=mc_seed,
                                     n_jobs=1)
        record.engines[primary.method.value] = primary
        record.notes.append(f'monte carlo fallback ({cfg.fallback_mc_samples} '
                            'samples)')
    record.primary = primary.method.value

    value = primary.value
    slack = _slack(primary)
    thm1 = theorem1_upper(a)
    if cfg.inject_failure:
        thm1 -= 1.
    lower = lower_stability(a)
    aggregated = aggregated_upper(a)
    regions = classify_region(a)
    record.regions = regions
    record.bounds.update({'theorem1_upper': thm1, 'lower_stability': lower,
                          'aggregated': aggregated,
                          'direct': regions.direct_bound})

    checks = record.checks
    checks['slicing_lower'] = _at_least(value, 1., slack)
    checks['slicing_upper'] = _at_most(value, 2., slack)
    checks['theorem1'] = _at_most(value, thm1, slack)
    checks['lower_stability'] = _at_least(value, lower, slack)
    checks['fourier_product'] = _product_check(a, value, slack, cfg,
                                               record.bounds)
    checks['direct_bound'] = _at_most(value, regions.direct_bound, slack)
    if regions.bounds:
        checks['region_coverage'] = CheckResult(PASS, note=','.join(
            tag.value for tag in regions.tags))
        checks['region_bound'] = _at_most(value, regions.minimum, slack)
    else:
        checks['region_coverage'] = CheckResult(FAIL, note='no region applies')
        checks['region_bound'] = CheckResult(NOT_APPLICABLE, note='no region')
    if regions.delta > NEAR_EXTREMISER_DELTA and regions.bounds:
        margin = aggregated + 1e-12 - regions.minimum
        checks['aggregation'] = CheckResult(PASS if margin >= 0 else FAIL, margin)
    else:
        checks['aggregation'] = CheckResult(NOT_APPLICABLE,
                                            note='near extremiser or uncovered')
    identity_margin = 1e-12 - abs(regions.delta - _extremiser_distance2(a))
    checks['delta_identity'] = CheckResult(PASS if identity_margin >= 0 else FAIL,
                                           identity_margin)
    checks['engine_agreement'] = _engine_agreement(record.engines)
    if n == 2:
        margin = 2. - math.sqrt(max(regions.delta, 0.)) - regions.direct_bound
        checks['two_dim_deficit'] = CheckResult(
            PASS if two_dim_deficit_holds(a, tol=SLACK_FLOOR) else FAIL, margin)
    else:
        checks['two_dim_deficit'] = CheckResult(NOT_APPLICABLE, note='n != 2')
    record.runtime = time.perf_counter() - start
    return record


def sweep(cfg: SweepConfig) -> VerificationReport:
    '''
    Run every check over the directions of :func:`sample_directions`.

    Returns
    -------
    VerificationReport
        Records ordered by sample index.
    '''
    start = time.perf_counter()
    items = list(enumerate(sample_directions(cfg)))
    logger.info('Sweeping %d directions (%s sampler, seed %d).', len(items),
                cfg.sampler, cfg.seed)
    records = parallel_map(lambda item: evaluate_direction(item[0], item[1][0],
                                                           item[1][1], cfg),
                           items, n_jobs=cfg.n_jobs)
    report = VerificationReport(config=cfg, records=records,
                                runtime=time.perf_counter() - start)
    for index, name in report.failures:
        logger.warning('Check `%s` failed for direction %d.', name, index)
    return report


# Scans
# -----
def asymptotic_extremiser_scan(n_list: Sequence[int] = (16, 32, 64),
                               cfg: Optional[QuadratureConfig] = None) -> ScanResult:
    '''
    Tabulate ``A_n`` at the uniform direction ``(1, ..., 1) / sqrt(n)``.

    Passes iff every deficit ``d_n = 2 - A_n`` is positive and the
    consecutive ratios of ``n d_n`` over the largest three ``n`` lie in
    ``[0.75, 1.33]``.
    '''
    ns = sorted(set(int(n) for n in n_list))
    if not ns or ns[0] < 3:
        raise ValueError(f'Asymptotic scan needs n >= 3 (got {list(n_list)}).')
    rows = []
    previous = None
    for n in ns:
        a = canonicalize(np.ones(n))
        estimate = volume_quadrature(a, cfg)
        deficit = 2. - estimate.value
        row = {'n': n, 'value': estimate.value, 'error': estimate.error,
               'deficit': deficit, 'scaled_deficit': n * deficit,
               'ratio': math.nan, 'oracle_diff': math.nan, 'monotone': None}
        if n == 3:
            row['oracle_diff'] = estimate.value - volume_closed_form_n3(a)
        if previous is not None:
            row['ratio'] = row['scaled_deficit'] / previous['scaled_deficit']
            row['monotone'] = bool(estimate.value > previous['value'])
        rows.append(row)
        previous = row
    table = pd.DataFrame(rows)
    notes = []
    passed = bool((table['deficit'] > 0).all())
    if not passed:
        notes.append('nonpositive deficit')
    ratios = table['ratio'].iloc[-2:] if len(table) >= 3 else table['ratio'].iloc[1:]
    if not ((ratios >= 0.75) & (ratios <= 1.33)).all():
        passed = False
        notes.append('scaled deficit ratios outside [0.75, 1.33]')
    return ScanResult('asymptotic_extremiser', table, passed, notes)


def near_extremiser_scan(epsilons: Iterable[float] = (0.1, 0.05, 0.01, 0.001)) -> ScanResult:
    '''
    Tabulate ``A_2`` along ``(sqrt(1/2 + eps), sqrt(1/2 - eps))``.

    The deficit is exactly ``2 - 1 / (1/2 + eps)``, so ``deficit / eps =
    4 / (1 + 2 eps)``; the scan passes iff that ratio lies in ``[1, 4]`` for
    every ``eps <= 0.1``.
    '''
    rows = []
    for eps in epsilons:
        eps = float(eps)
        if not 0 < eps < 0.5:
            raise ValueError(f'eps must be in (0, 1/2) (got {eps}).')
        a = canonicalize([math.sqrt(0.5 + eps), math.sqrt(0.5 - eps)])
        exact = 1. / (0.5 + eps)
        deficit = 2. - exact
        d = delta(a)
        rows.append({'epsilon': eps, 'value': exact,
                     'direction_value': a.a1 ** -2, 'deficit': deficit,
                     'delta': d, 'deficit_over_eps': deficit / eps,
                     'deficit_over_sqrt_delta': deficit / math.sqrt(max(d, 0.))
                     if d > 0 else math.nan})
    table = pd.DataFrame(rows)
    notes = []
    window = table[table['epsilon'] <= 0.1]['deficit_over_eps']
    passed = bool(((window >= 1. - 1e-12) & (window <= 4. + 1e-12)).all())
    if not passed:
        notes.append('deficit / eps outside [1, 4]')
    consistent = (table['value'] - table['direction_value']).abs() <= 1e-12
    if not consistent.all():
        passed = False
        notes.append('direction value disagrees with exact value')
    return ScanResult('near_extremiser', table, passed, notes)


def psi_scan(s_grid: Optional[Iterable[float]] = None,
             cfg: Optional[QuadratureConfig] = None) -> ScanResult:
    '''
    Tabulate ``Psi(s)`` against its quantitative upper bounds.

    Passes iff ``Psi(s) <= min(1, bound(s)) + error + 1e-6`` at every grid
    point.
    '''
    if s_grid is None:
        s_grid = np.linspace(2., 60., 60)
    rows = []
    for s in s_grid:
        s = float(s)
        if s < 2:
            raise ValueError(f'Psi scan needs s >= 2 (got {s}).')
        value = psi(s, cfg)
        bound = min(1., psi_quantitative_bound(s))
        rows.append({'s': s, 'value': value.value, 'error': value.error,
                     'route': value.route,
                     'small_s_bound': 1. - (s - 2.) ** 2 / 12.,
                     'large_s_bound': 1. - 1. / (151. * s),
                     'bound': bound,
                     'ok': bool(value.value <= bound + value.error + SLACK_FLOOR)})
    table = pd.DataFrame(rows)
    passed = bool(table['ok'].all())
    notes = [] if passed else [f's = {s:g} exceeds bound'
                               for s in table.loc[~table['ok'], 's']]
    return ScanResult('psi', table, passed, notes)


def lipschitz_scan(n: int = 4, pairs: int = 20,
                   distances: Sequence[float] = (1e-1, 1e-2, 1e-3),
                   seed: int = 0,
                   cfg: Optional[QuadratureConfig] = None) -> ScanResult:
    '''
    Check ``|A(a) - A(b)| <= 4 sqrt(2) |a - b|`` on random nearby pairs.

    ``b`` is the canonicalization of ``a + d u`` for a random unit ``u``; the
    distance is measured between the canonical vectors.
    '''
    if n < 2:
        raise ValueError(f'Lipschitz scan needs n >= 2 (got {n}).')
    rows = []
    for i in range(pairs):
        rng = _item_generator(seed, n, i)
        a = canonicalize(rng.standard_normal(n))
        u = rng.standard_normal(n)
        d = distances[i % len(distances)]
        b = canonicalize(a.as_array() + d * u / np.linalg.norm(u))
        A_a = volume_auto(a, cfg)
        A_b = volume_auto(b, cfg)
        distance = a.distance(b)
        rows.append({'pair': i, 'step': d, 'distance': distance,
                     'value_a': A_a.value, 'value_b': A_b.value,
                     'difference': abs(A_a.value - A_b.value),
                     'bound': LIPSCHITZ_CONSTANT * distance,
                     'ok': bool(lipschitz_check(a, b, A_a, A_b, err=1e-12))})
    table = pd.DataFrame(rows)
    passed = bool(table['ok'].all())
    notes = [] if passed else [f'pair {i} violates the Lipschitz bound'
                               for i in table.loc[~table['ok'], 'pair']]
    return ScanResult('lipschitz', table, passed, notes)
