# coding: utf-8
"""
Explicit upper and lower bounds on section volumes and the region partition
of the space of canonical directions.

Every bound here is a closed-form expression, except
:func:`fourier_product_upper`, which evaluates :func:`polyslice.volume.psi`
one-sidedly (value plus error).

.. versionadded:: 0.1.0
"""
import enum
import logging
import math

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional, Union

from .volume import (DEFAULT_PSI_CONFIG, PSI_SLOW_MIN, DimensionMismatch,
                     Direction, DomainError, PsiValue, QuadratureConfig,
                     VolumeEstimate, psi)

__all__ = ['INV_SQRT2', 'SQRT_3_8', 'LIPSCHITZ_CONSTANT',
           'BERRY_ESSEEN_CONSTANT', 'PSI_LARGE_S', 'Region',
           'RegionAssignment', 'StabilityBounds', 'delta', 'theorem1_upper',
           'lower_stability', 'fourier_product_upper', 'berry_esseen_bound',
           'berry_esseen_upper', 'gaussian_comparison', 'classify_region',
           'lipschitz_check', 'two_dim_deficit_holds',
           'psi_quantitative_bound', 'aggregated_upper', 'stability_bounds']

logger = logging.getLogger(__name__)

INV_SQRT2 = 1. / math.sqrt(2.)
SQRT_3_8 = math.sqrt(3. / 8.)
LIPSCHITZ_CONSTANT = 4. * math.sqrt(2.)
#: Berry-Esseen constant for sums of independent uniform points of S^3.
BERRY_ESSEEN_CONSTANT = 42. * math.sqrt(2.) + 16.
#: Factors with ``a_k^-2 >= PSI_LARGE_S`` use ``Psi <= 1``.
PSI_LARGE_S = 1e4

DISTANCE_COEFF = 1e-40
AGGREGATED_DISTANCE_COEFF = 1.2e-40
L4_DIVISOR = 76.
L8_L4_DIVISOR = 151.
NEAR_EXTREMISER_DELTA = 1. / 5000.
SMALL_A2 = 6e-5
MODERATE_A2_MAX = (1. - 1e-5) / math.sqrt(2.)
L12_A1_EXCESS = 6e-41
L12_A2_MAX = (1. - 1e-4) / math.sqrt(2.)


class Region(str, enum.Enum):
    L7 = 'L7'
    L8 = 'L8'
    L9 = 'L9'
    L10 = 'L10'
    C11 = 'C11'
    L12 = 'L12'
    L13 = 'L13'


@dataclass(frozen=True)
class RegionAssignment:
    '''
    Attributes
    ----------
    bounds : dict
        Upper bound of every region containing the direction, keyed by
        :class:`Region`.
    delta : float
        ``2 - sqrt(2) (a_1 + a_2)``.
    direct_bound : float
        ``a_1^-2``, valid for every direction.
    '''
    bounds: Dict[Region, float]
    delta: float
    direct_bound: float

    @property
    def tags(self) -> List[Region]:
        return list(self.bounds)

    @property
    def minimum(self) -> Optional[float]:
        '''Smallest applicable region bound, ``None`` if no region applies.'''
        return min(self.bounds.values()) if self.bounds else None

    def as_dict(self) -> dict:
        return {'tags': [tag.value for tag in self.bounds],
                'bounds': {tag.value: value for tag, value in self.bounds.items()},
                'delta': self.delta,
                'direct_bound': self.direct_bound}


@dataclass(frozen=True)
class StabilityBounds:
    upper_thm1: float
    lower_stab: float
    fourier_product: float
    aggregated: float
    gaussian: Optional[float] = None
    lipschitz_constant: float = field(default=LIPSCHITZ_CONSTANT)

    def as_dict(self) -> dict:
        return {'theorem1_upper': self.upper_thm1,
                'lower_stability': self.lower_stab,
                'fourier_product': self.fourier_product,
                'aggregated': self.aggregated,
                'gaussian': self.gaussian,
                'lipschitz_constant': self.lipschitz_constant}


def _require_n2(a: Direction, name: str):
    if a.n < 2:
        raise DimensionMismatch(f'`{name}` needs n >= 2 (got n={a.n}).')


def delta(a: Direction) -> float:
    '''
    Returns
    -------
    float
        ``2 - sqrt(2) (a_1 + a_2)``, the squared distance to
        ``(e_1 + e_2) / sqrt(2)``.
    '''
    _require_n2(a, 'delta')
    return 2. - math.sqrt(2.) * (a.a1 + a.a2)


def _distance_to_extremiser(a: Direction) -> float:
    return math.sqrt(max(delta(a), 0.))


def theorem1_upper(a: Direction) -> float:
    '''
    Returns
    -------
    float
        ``2 - min{1e-40 |a - (e_1 + e_2)/sqrt(2)|, ||a||_4^4 / 76}``.
    '''
    _require_n2(a, 'theorem1_upper')
    return 2. - min(DISTANCE_COEFF * _distance_to_extremiser(a),
                    a.l4_norm4 / L4_DIVISOR)


def aggregated_upper(a: Direction) -> float:
    '''
    Returns
    -------
    float
        ``2 - min{1.2e-40 sqrt(delta), ||a||_4^4 / 76}``, the bound obtained
        by combining the region bounds.
    '''
    _require_n2(a, 'aggregated_upper')
    return 2. - min(AGGREGATED_DISTANCE_COEFF * _distance_to_extremiser(a),
                    a.l4_norm4 / L4_DIVISOR)


def lower_stability(a: Direction) -> float:
    '''
    Returns
    -------
    float
        ``1 + (2 - 2 a_1) / 4``, i.e. ``1 + |a - e_1|^2 / 4``.
    '''
    return 1. + (2. - 2. * a.a1) / 4.


@lru_cache(maxsize=4096)
def _cached_psi(s: float, cfg: QuadratureConfig) -> PsiValue:
    return psi(s, cfg)


def fourier_product_upper(a: Direction,
                          cfg: Optional[QuadratureConfig] = None) -> float:
    '''
    Parameters
    ----------
    a : Direction
    cfg : QuadratureConfig, optional
        Configuration for :func:`polyslice.volume.psi` (default
        ``abs_tol=1e-7``).

    Returns
    -------
    float
        ``2 prod_k Psi(a_k^-2)^(a_k^2)`` with each factor taken as value plus
        error, or ``inf`` when some ``a_k^-2 < 1.4``.
    '''
    cfg = cfg or DEFAULT_PSI_CONFIG
    log_total = math.log(2.)
    for w in a.effective:
        s = w ** -2
        if s < PSI_SLOW_MIN:
            return math.inf
        if s >= PSI_LARGE_S:
            # Psi(s) <= 1.
            continue
        value = _cached_psi(s, cfg)
        log_total += w * w * math.log(value.value + value.error)
    return math.exp(log_total)


def gaussian_comparison(a1: float) -> float:
    '''
    Returns
    -------
    float
        ``(1 - exp(-2 a_1^2 / (1 - a_1^2))) / a_1^2``.
    '''
    if not 0 < a1 < 1:
        raise DomainError(f'Gaussian comparison needs 0 < a_1 < 1 (got {a1}).')
    return -math.expm1(-2. * a1 * a1 / (1. - a1 * a1)) / (a1 * a1)


def berry_esseen_bound(a1: float, a2: float) -> float:
    '''
    Parameters
    ----------
    a1, a2 : float
        Largest and second largest weights, ``0 < a1 < 1``.

    Returns
    -------
    float
        Gaussian comparison plus ``8 (42 sqrt(2) + 16) a_2 /
        (a_1^2 sqrt(1 - a_1^2))``.
    '''
    return (gaussian_comparison(a1)
            + 8. * BERRY_ESSEEN_CONSTANT * a2 / (a1 * a1 * math.sqrt(1. - a1 * a1)))


def berry_esseen_upper(a: Direction) -> float:
    _require_n2(a, 'berry_esseen_upper')
    return berry_esseen_bound(a.a1, a.a2)


def psi_quantitative_bound(s: float) -> float:
    '''
    Returns
    -------
    float
        ``1 - (s - 2)^2 / 12`` for ``2 <= s <= 8/3`` and ``1 - 1 / (151 s)``
        beyond.
    '''
    if s < 2:
        raise DomainError(f'Quantitative bound needs s >= 2 (got {s}).')
    if s <= 8. / 3.:
        return 1. - (s - 2.) ** 2 / 12.
    return 1. - 1. / (151. * s)


def classify_region(a: Direction) -> RegionAssignment:
    '''
    Assign every closed region of the partition containing ``a``.

    Returns
    -------
    RegionAssignment
        ``L12`` is never assigned in double precision: a float above
        ``1/sqrt(2)`` exceeds it by at least one ulp, far more than the
        ``6e-41`` width of that region.  The bounds of L10, C11, L12 and L13
        lie within one ulp of ``2`` and round to ``2.0``; for L13 the direct
        bound ``a_1^-2 < 2`` is the sharper one.
    '''
    _require_n2(a, 'classify_region')
    a1, a2 = a.a1, a.a2
    d = delta(a)
    bounds = {}
    if d <= NEAR_EXTREMISER_DELTA:
        bounds[Region.L7] = 2. - math.sqrt(max(d, 0.)) / 25.
    if a1 <= SQRT_3_8:
        bounds[Region.L8] = 2. * math.exp(-a.l4_norm4 / L8_L4_DIVISOR)
    if SQRT_3_8 <= a1 <= INV_SQRT2:
        if a2 <= SMALL_A2:
            bounds[Region.L9] = 2. - 1e-5
        if SMALL_A2 <= a2 <= MODERATE_A2_MAX:
            bounds[Region.L10] = 2. - 1e-19
        if a2 <= MODERATE_A2_MAX:
            bounds[Region.C11] = 2. - 1e-19
    if a1 > INV_SQRT2:
        if a1 - INV_SQRT2 <= L12_A1_EXCESS and a2 <= L12_A2_MAX:
            bounds[Region.L12] = 2. - 1e-20
        bounds[Region.L13] = 2. - 12. * math.sqrt(2.) * 1e-41
    return RegionAssignment(bounds=bounds, delta=d, direct_bound=a1 ** -2)


def lipschitz_check(a: Direction, b: Direction,
                    A_a: Union[float, VolumeEstimate],
                    A_b: Union[float, VolumeEstimate], err: float = 0.) -> bool:
    '''
    Returns
    -------
    bool
        ``|A_a - A_b| <= 4 sqrt(2) |a - b| + err``.  Errors of volume
        estimates are added to ``err``.
    '''
    for estimate in (A_a, A_b):
        if isinstance(estimate, VolumeEstimate):
            err += estimate.error
    value_a = A_a.value if isinstance(A_a, VolumeEstimate) else A_a
    value_b = A_b.value if isinstance(A_b, VolumeEstimate) else A_b
    return abs(value_a - value_b) <= LIPSCHITZ_CONSTANT * a.distance(b) + err


def two_dim_deficit_holds(a: Direction, tol: float = 1e-7) -> bool:
    '''
    Returns
    -------
    bool
        ``a_1^-2 <= 2 - sqrt(delta) + tol`` for ``n = 2``.
    '''
    if a.n != 2:
        raise DimensionMismatch(f'Two-dimensional deficit needs n=2 (got n={a.n}).')
    return a.a1 ** -2 <= 2. - math.sqrt(max(delta(a), 0.)) + tol


def stability_bounds(a: Direction,
                     cfg: Optional[QuadratureConfig] = None) -> StabilityBounds:
    '''
    Evaluate every direction-wise bound.
    '''
    _require_n2(a, 'stability_bounds')
    gaussian = None
    if a.a1 < 1:
        gaussian = berry_esseen_upper(a)
    return StabilityBounds(upper_thm1=theorem1_upper(a),
                           lower_stab=lower_stability(a),
                           fourier_product=fourier_product_upper(a, cfg),
                           aggregated=aggregated_upper(a),
                           gaussian=gaussian)
