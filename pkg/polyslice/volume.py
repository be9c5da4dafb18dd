# coding: utf-8
"""
Central hyperplane section volumes of the complex cube (polydisc).

For a unit vector ``a`` with nonnegative, nonincreasing weights, the
normalized section volume is the Fourier integral

.. math::

    A_n(a) = \\frac{1}{2} \\int_0^\\infty \\prod_j k(a_j t)\\, t\\, dt,
    \\qquad k(u) = \\frac{2 J_1(u)}{u},

and, by the probabilistic formula, the expectation of
``min{a_1^{-2}, |a_2 xi_2 + ... + a_n xi_n|^{-2}}`` over independent uniform
points ``xi_k`` of the unit sphere :math:`S^3 \\subset \\mathbb{R}^4`.

Three independent engines are provided:

- :func:`volume_quadrature`: panel Gauss-Legendre quadrature of the Fourier
  integral with a rigorous tail bound, or an exact contour closure of the
  tail for directions needing too many panels;
- :func:`volume_monte_carlo`: Rao-Blackwellized Monte Carlo estimator on
  counter-based random streams;
- closed forms (:func:`volume_closed_form_n3`, :func:`volume_dominant`).

:func:`psi` evaluates the special function
``Psi(s) = (s / 4) int_0^inf |k(t)|^s t dt``.

.. versionadded:: 0.1.0
"""
import enum
import itertools as it
import logging
import math
import warnings

from dataclasses import asdict, dataclass, replace
from functools import lru_cache
from typing import Callable, Iterable, List, Optional, Tuple

import numpy as np
import scipy.integrate as si
import scipy.optimize as so
import scipy.special as ss

from numpy.polynomial.legendre import leggauss

from .parallel_util import parallel_map
from .special import C_ENV, ENVELOPE, abs_cos_mean, bessel_modulus, j1_zeros, kernel

__all__ = ['PolysliceError', 'ZeroVector', 'NonFinite', 'DimensionMismatch',
           'DomainError', 'SlowConvergence', 'TolNotReached', 'Method',
           'Direction', 'VolumeEstimate', 'PsiValue', 'QuadratureConfig',
           'DEFAULT_VOLUME_CONFIG', 'DEFAULT_PSI_CONFIG', 'MC_BLOCK',
           'canonicalize', 'volume_quadrature', 'volume_monte_carlo',
           'monte_carlo_samples', 'volume_closed_form_n3', 'volume_dominant',
           'volume_auto', 'psi']

logger = logging.getLogger(__name__)

#: Tolerance on ``sum(a_k^2) == 1`` for :class:`Direction`.
NORM_TOL = 1e-12
#: :func:`psi` diverges for ``s <= PSI_DOMAIN_MIN``.
PSI_DOMAIN_MIN = 4. / 3.
#: :func:`psi` refuses ``PSI_DOMAIN_MIN < s < PSI_SLOW_MIN``.
PSI_SLOW_MIN = 1.4
#: Number of Monte Carlo samples drawn from one counter-based stream.
MC_BLOCK = 1 << 16
#: Kernel factors with arguments ``a_j T >= HANKEL_MIN_ARG`` are split into
#: Hankel functions by the contour tail closure.
HANKEL_MIN_ARG = 2.0
#: Zeros of ``J_1`` available to the period-average tail of :func:`psi`,
#: independent of ``max_panels``.  Enough for ``s = 1.4`` at ``abs_tol=1e-8``.
PSI_CLOSURE_MAX_ZEROS = 1 << 15

# Panels integrated per vectorized chunk.
_PANEL_CHUNK = 256
# Beyond this argument the one-term Hankel expansion is used; its relative
# error is below 4e-9.
_HANKEL_ASYMPTOTIC = 1e8


class PolysliceError(ValueError):
    pass


class ZeroVector(PolysliceError):
    pass


class NonFinite(PolysliceError):
    pass


class DimensionMismatch(PolysliceError):
    pass


class DomainError(PolysliceError):
    pass


class SlowConvergence(DomainError):
    pass


class TolNotReached(PolysliceError):
    '''
    Raised when an engine exhausts its budget before reaching the requested
    absolute tolerance.

    Attributes
    ----------
    value : float
        Best partial estimate.
    error : float
        Error bound achieved by ``value``.
    tolerance : float
        Requested absolute tolerance.
    panels : int
        Number of panels integrated.
    '''
    def __init__(self, value: float, error: float, tolerance: float,
                 panels: int):
        self.value = value
        self.error = error
        self.tolerance = tolerance
        self.panels = panels
        super(TolNotReached, self).__init__(value, error, tolerance, panels)

    def __str__(self):
        return (f'tolerance {self.tolerance:g} not reached after '
                f'{self.panels} panels (estimate {self.value!r}, error bound '
                f'{self.error:g})')


class Method(str, enum.Enum):
    QUADRATURE = 'quadrature'
    MONTE_CARLO = 'monte_carlo'
    CLOSED_FORM = 'closed_form'


@dataclass(frozen=True)
class Direction:
    '''
    Canonical direction: ``a_1 >= ... >= a_n >= 0`` with unit Euclidean norm.

    Use :func:`canonicalize` to build one from arbitrary finite input.
    '''
    weights: Tuple[float, ...]

    def __post_init__(self):
        weights = tuple(float(w) for w in self.weights)
        object.__setattr__(self, 'weights', weights)
        if not weights:
            raise DimensionMismatch('A direction needs at least one weight.')
        if not all(math.isfinite(w) for w in weights):
            raise NonFinite(f'Non-finite weight in {weights}.')
        if weights[-1] < 0:
            raise ValueError(f'Weights must be nonnegative: {weights}.')
        if any(w_i < w_j for w_i, w_j in zip(weights[:-1], weights[1:])):
            raise ValueError(f'Weights must be nonincreasing: {weights}.')
        norm_error = abs(math.fsum(w * w for w in weights) - 1.)
        if norm_error > NORM_TOL:
            raise ValueError(f'Weights must have unit norm (off by '
                             f'{norm_error:g}).')

    def __len__(self):
        return len(self.weights)

    @property
    def n(self) -> int:
        return len(self.weights)

    @property
    def a1(self) -> float:
        return self.weights[0]

    @property
    def a2(self) -> float:
        return self.weights[1] if self.n > 1 else 0.

    @property
    def effective(self) -> Tuple[float, ...]:
        '''Nonzero weights.'''
        return tuple(w for w in self.weights if w > 0)

    @property
    def m(self) -> int:
        '''Effective dimension (number of nonzero weights).'''
        return len(self.effective)

    @property
    def l4_norm4(self) -> float:
        return math.fsum(w ** 4 for w in self.weights)

    def as_array(self) -> np.ndarray:
        return np.array(self.weights)

    def distance(self, other: 'Direction') -> float:
        '''
        Euclidean distance to another direction of the same dimension.
        '''
        if other.n != self.n:
            raise DimensionMismatch(f'Cannot compare directions with n={self.n} '
                                    f'and n={other.n}.')
        return math.sqrt(math.fsum((x - y) ** 2 for x, y in
                                   zip(self.weights, other.weights)))


@dataclass(frozen=True)
class VolumeEstimate:
    '''
    Attributes
    ----------
    value : float
        Estimate of the normalized section volume.
    method : Method
        Engine family.
    error : float
        Absolute error bound (quadrature, closed form) or sample standard
        error (Monte Carlo).
    samples_or_panels : int
        Panels integrated or samples drawn.
    route : str
        Sub-path of the engine, e.g. ``rigorous_tail`` or ``lemma2_n3``.
    '''
    value: float
    method: Method
    error: float
    samples_or_panels: int
    route: str = ''

    def as_dict(self) -> dict:
        record = asdict(self)
        record['method'] = self.method.value
        return record


@dataclass(frozen=True)
class PsiValue:
    s: float
    value: float
    error: float
    route: str = ''
    panels: int = 0

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class QuadratureConfig:
    '''
    Attributes
    ----------
    abs_tol : float
        Absolute tolerance on the integral.
    panel_width_factor : float
        Scale applied to the natural panel width.
    max_panels : int
        Panel budget (panels for volumes, zeros of ``J_1`` for ``Psi``).
    nodes_per_panel : int
        Gauss-Legendre nodes per panel; the error estimate compares with
        the rule of half the order.
    tail_closure : bool
        Close the tail analytically when the rigorous truncation point
        exceeds the budget.  When ``False``, :class:`TolNotReached` is raised
        instead.
    closure_panels : int
        Panels integrated before the contour tail closure takes over.
    '''
    abs_tol: float = 1e-8
    panel_width_factor: float = 1.0
    max_panels: int = 4096
    nodes_per_panel: int = 32
    tail_closure: bool = True
    closure_panels: int = 64

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise ValueError(f'`abs_tol` must be positive (got {self.abs_tol}).')
        if not self.panel_width_factor > 0:
            raise ValueError('`panel_width_factor` must be positive (got '
                             f'{self.panel_width_factor}).')
        if self.max_panels < 1:
            raise ValueError(f'`max_panels` must be at least 1 (got '
                             f'{self.max_panels}).')
        if self.nodes_per_panel < 2:
            raise ValueError('`nodes_per_panel` must be at least 2 (got '
                             f'{self.nodes_per_panel}).')
        if self.closure_panels < 1:
            raise ValueError('`closure_panels` must be at least 1 (got '
                             f'{self.closure_panels}).')

    def with_tol(self, abs_tol: float) -> 'QuadratureConfig':
        return replace(self, abs_tol=abs_tol)


DEFAULT_VOLUME_CONFIG = QuadratureConfig(abs_tol=1e-8)
DEFAULT_PSI_CONFIG = QuadratureConfig(abs_tol=1e-7)


def canonicalize(raw: Iterable[float]) -> Direction:
    '''
    Parameters
    ----------
    raw : iterable of float
        Nonzero finite vector.

    Returns
    -------
    Direction
        Absolute values, sorted nonincreasing and scaled to unit norm.  Zero
        entries are retained.

    Raises
    ------
    ZeroVector
        If the vector is empty or zero.
    NonFinite
        If an entry is NaN or infinite.
    '''
    values = np.asarray(list(raw) if not isinstance(raw, np.ndarray) else raw,
                        dtype=float).ravel()
    if values.size == 0:
        raise ZeroVector('Empty direction.')
    if not np.all(np.isfinite(values)):
        raise NonFinite(f'Non-finite entries in {values.tolist()}.')
    values = np.sort(np.abs(values))[::-1]
    if values[0] == 0:
        raise ZeroVector('Zero vector has no direction.')
    # Scale by the largest entry first so huge and tiny inputs do not
    # overflow or underflow when squared.
    values = values / values[0]
    norm = math.sqrt(math.fsum(values * values))
    return Direction(tuple((values / norm).tolist()))


# Quadrature helpers
# ------------------
@lru_cache(maxsize=16)
def _gauss_legendre(nodes: int) -> Tuple[np.ndarray, np.ndarray]:
    return leggauss(nodes)


def _integrate_panels(func: Callable[[np.ndarray], np.ndarray],
                      edges: np.ndarray, nodes: int) -> Tuple[float, float]:
    '''
    Integrate ``func`` over consecutive panels ``[edges[i], edges[i + 1]]``.

    Returns
    -------
    value : float
        Sum of ``nodes``-point Gauss-Legendre panel integrals.
    error : float
        Sum over panels of the absolute difference with the rule of half
        the order.
    '''
    x_hi, w_hi = _gauss_legendre(nodes)
    x_lo, w_lo = _gauss_legendre(max(nodes // 2, 1))
    parts = []
    error = 0.
    for start in range(0, len(edges) - 1, _PANEL_CHUNK):
        lo = edges[start:start + _PANEL_CHUNK]
        hi = edges[start + 1:start + _PANEL_CHUNK + 1]
        lo = lo[:len(hi)]
        half = 0.5 * (hi - lo)[:, None]
        mid = 0.5 * (hi + lo)[:, None]
        q_hi = (func(mid + half * x_hi) * w_hi).sum(axis=1) * half[:, 0]
        q_lo = (func(mid + half * x_lo) * w_lo).sum(axis=1) * half[:, 0]
        parts.append(q_hi)
        error += float(np.abs(q_hi - q_lo).sum())
    return math.fsum(np.concatenate(parts)), error


def _quad(func: Callable[[float], float], lo: float, hi: float,
          epsabs: float) -> Tuple[float, float]:
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter('always', si.IntegrationWarning)
        value, error = si.quad(func, lo, hi, epsabs=epsabs, epsrel=0,
                               limit=500)
    caught = [w for w in caught if issubclass(w.category, si.IntegrationWarning)]
    if caught:
        # The error estimate of an unconverged quad is not a bound.
        error = max(error, abs(value), epsabs)
        logger.warning('quad on [%g, %g] did not converge (%s); error '
                       'inflated to %g.', lo, hi, caught[-1].message, error)
    return value, error


# Section volume by quadrature
# ----------------------------
def _volume_integrand(weights: np.ndarray) -> Callable[[np.ndarray], np.ndarray]:
    def integrand(t: np.ndarray) -> np.ndarray:
        value = 0.5 * t
        for w in weights:
            value = value * kernel(w * t)
        return value
    return integrand


def _volume_tail_bound(weights: np.ndarray, cutoff: float) -> float:
    '''
    Exact value of ``(1/2) int_cutoff^inf t prod_j min(1, c (a_j t)^-1.5) dt``.

    Between consecutive switch points ``t_switch / a_j`` the integrand is a
    single power of ``t``; each piece is integrated in closed form with the
    coefficients kept in log space.
    '''
    log_c = math.log(C_ENV)
    switch = np.concatenate(([0.], ENVELOPE.t_switch / weights, [np.inf]))
    cum_log = np.concatenate(([0.], np.cumsum(np.log(weights))))
    total = 0.
    for k in range(len(weights) + 1):
        lo = max(switch[k], cutoff)
        hi = switch[k + 1]
        if lo >= hi:
            continue
        # Piece with the k largest factors on their algebraic branch.
        q = 2. - 1.5 * k
        log_coef = k * log_c - 1.5 * cum_log[k] - math.log(abs(q))
        upper = 0. if math.isinf(hi) else math.exp(log_coef + q * math.log(hi))
        lower = 0. if lo == 0 else math.exp(log_coef + q * math.log(lo))
        total += abs(upper - lower)
    return 0.5 * total


def _rigorous_cutoff(weights: np.ndarray, target: float) -> float:
    '''
    Smallest ``T`` (up to root-finding tolerance) with tail bound below
    ``target``.
    '''
    log_target = math.log(target)

    def gap(x):
        return math.log(max(_volume_tail_bound(weights, math.exp(x)), 1e-300)) - log_target

    lo = math.log(ENVELOPE.t_switch / weights[0])
    if gap(lo) <= 0:
        return math.exp(lo)
    hi = lo + 1.
    while gap(hi) > 0:
        if hi > 690:
            return math.inf
        hi = lo + 2. * (hi - lo)
    x = so.brentq(gap, lo, hi, xtol=1e-12)
    return math.exp(x) * (1. + 1e-9)


class _ClosureUnavailable(RuntimeError):
    pass


def _scaled_hankel(sign: float, z: complex) -> complex:
    if abs(z) > _HANKEL_ASYMPTOTIC:
        # Leading term of the large-argument expansion.
        return np.sqrt(2. / (math.pi * z)) * np.exp(-sign * 0.75j * math.pi)
    return ss.hankel1e(1, z) if sign > 0 else ss.hankel2e(1, z)


def _hankel_factors(fast: np.ndarray, signs: np.ndarray, t: complex) -> complex:
    value = 1.
    for w, sign in zip(fast, signs):
        z = w * t
        value *= _scaled_hankel(sign, z) / z
    return value


def _ray_integral(fast, signs, slow, cutoff, omega, sigma,
                  epsabs) -> Tuple[float, float]:
    '''
    Real part of the integral of one Hankel combination along the vertical
    ray from ``cutoff`` into the half plane where ``exp(i omega t)`` decays.
    '''
    direction = 1. if omega > 0 else -1.
    rate = abs(omega) - sigma
    phase = np.exp(1j * omega * cutoff)

    def integrand(y):
        if rate * y > 745.:
            return 0.
        t = cutoff + 1j * direction * y
        value = 0.5 * t * phase * math.exp(-rate * y) * _hankel_factors(fast, signs, t)
        for w in slow:
            z = w * t
            value *= 2. * ss.jve(1, z) / z
        if not np.isfinite(value):
            raise _ClosureUnavailable(f'non-finite Hankel product at t={t}')
        # Re(i * direction * value)
        return -direction * value.imag

    return _quad(integrand, 0., np.inf, epsabs)


def _real_axis_integral(fast, signs, slow, cutoff, omega,
                        epsabs) -> Tuple[float, float]:
    def integrand(t):
        value = 0.5 * t * np.exp(1j * omega * t) * _hankel_factors(fast, signs, t)
        for w in slow:
            value *= kernel(w * t)
        if not np.isfinite(value):
            raise _ClosureUnavailable(f'non-finite Hankel product at t={t}')
        return value.real

    return _quad(integrand, cutoff, np.inf, epsabs)


def _contour_tail(weights: np.ndarray, cutoff: float,
                  tol: float) -> Tuple[float, float]:
    '''
    Exact tail ``(1/2) int_cutoff^inf t prod_j k(a_j t) dt``.

    Factors with ``a_j cutoff >= HANKEL_MIN_ARG`` are written as
    ``(H^(1) + H^(2))(a_j t) / (a_j t)``; the remaining factors are kept as
    entire functions.  Combinations come in complex conjugate pairs, so only
    those with a leading ``H^(1)`` are integrated and their real parts
    doubled.
    '''
    fast = weights[weights * cutoff >= HANKEL_MIN_ARG]
    slow = weights[weights * cutoff < HANKEL_MIN_ARG]
    if fast.size == 0:
        raise _ClosureUnavailable('no factor is large enough for the Hankel '
                                  'split')
    sigma = float(slow.sum())
    combinations = 2 ** (fast.size - 1)
    epsabs = tol / (2. * combinations)
    total = 0.
    error = 0.
    for tail_signs in it.product((1., -1.), repeat=fast.size - 1):
        signs = np.array((1.,) + tail_signs)
        omega = float(np.dot(signs, fast))
        if abs(omega) > sigma:
            part, part_error = _ray_integral(fast, signs, slow, cutoff, omega,
                                             sigma, epsabs)
        elif fast.size >= 2:
            part, part_error = _real_axis_integral(fast, signs, slow, cutoff,
                                                   omega, epsabs)
        else:
            raise _ClosureUnavailable('resonant combination with a single '
                                      'Hankel factor')
        total += 2. * part
        error += 2. * part_error
    logger.debug('Contour tail from T=%g: %d combinations, %d slow factors.',
                 cutoff, combinations, slow.size)
    return total, error


def volume_quadrature(a: Direction,
                      cfg: Optional[QuadratureConfig] = None) -> VolumeEstimate:
    '''
    Section volume by panel quadrature of the Fourier integral.

    Panels have width ``panel_width_factor * min(pi / a_1, 2 pi)``.  They
    are summed up to the point where the rigorous tail bound drops below
    ``abs_tol / 2``.  If that needs more than ``max_panels`` panels, the
    first ``closure_panels`` panels are integrated and the remaining tail
    is evaluated exactly by rotating the contour of each Hankel combination
    off the real axis.

    Parameters
    ----------
    a : Direction
    cfg : QuadratureConfig, optional

    Returns
    -------
    VolumeEstimate
        Route ``rigorous_tail`` or ``contour_tail``.

    Raises
    ------
    TolNotReached
        If the budget is exhausted and the closure is disabled or misses
        the tolerance.
    '''
    cfg = cfg or DEFAULT_VOLUME_CONFIG
    if a.m == 1:
        return VolumeEstimate(1., Method.QUADRATURE, 0., 0, 'exact_n1')
    weights = np.array(a.effective)
    width = cfg.panel_width_factor * min(math.pi / weights[0], 2. * math.pi)
    integrand = _volume_integrand(weights)
    cutoff = _rigorous_cutoff(weights, 0.5 * cfg.abs_tol)
    needed = max(1, math.ceil(cutoff / width)) if math.isfinite(cutoff) else math.inf
    logger.debug('Rigorous cutoff T=%g needs %s panels of width %g.', cutoff,
                 needed, width)

    if needed <= cfg.max_panels:
        edges = width * np.arange(needed + 1)
        value, panel_error = _integrate_panels(integrand, edges,
                                               cfg.nodes_per_panel)
        error = panel_error + _volume_tail_bound(weights, edges[-1])
        panels, route = needed, 'rigorous_tail'
    elif not cfg.tail_closure:
        edges = width * np.arange(cfg.max_panels + 1)
        value, panel_error = _integrate_panels(integrand, edges,
                                               cfg.nodes_per_panel)
        error = panel_error + _volume_tail_bound(weights, edges[-1])
        logger.warning('Panel budget exhausted for %s.', a.weights)
        raise TolNotReached(value, error, cfg.abs_tol, cfg.max_panels)
    else:
        panels = min(cfg.closure_panels, cfg.max_panels)
        edges = width * np.arange(panels + 1)
        value, panel_error = _integrate_panels(integrand, edges,
                                               cfg.nodes_per_panel)
        logger.info('Closing tail by contour rotation at T=%g (rigorous '
                    'cutoff %g).', edges[-1], cutoff)
        try:
            tail, tail_error = _contour_tail(weights, edges[-1],
                                             0.5 * cfg.abs_tol)
        except _ClosureUnavailable as exception:
            logger.warning('Contour tail closure unavailable: %s', exception)
            raise TolNotReached(value, math.inf, cfg.abs_tol, panels)
        value += tail
        error = panel_error + tail_error
        route = 'contour_tail'

    if error > cfg.abs_tol:
        logger.warning('Quadrature error %g exceeds tolerance %g for %s.',
                       error, cfg.abs_tol, a.weights)
        raise TolNotReached(value, error, cfg.abs_tol, panels)
    return VolumeEstimate(value, Method.QUADRATURE, error, panels, route)


# Monte Carlo
# -----------
def _block_generator(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, block])))


def _block_samples(a: Direction, seed: int, block: int, count: int) -> np.ndarray:
    '''
    Samples ``min{a_1^-2, |a_2 xi_2 + ... + a_m xi_m|^-2}`` of one block.
    '''
    effective = a.effective
    cap = effective[0] ** -2
    rest = np.array(effective[1:])
    if rest.size == 0:
        return np.full(count, cap)
    if rest.size == 1:
        # |Y| = a_2 surely.
        return np.full(count, min(cap, rest[0] ** -2))
    rng = _block_generator(seed, block)
    gaussians = rng.standard_normal((count, rest.size, 4))
    norms = np.linalg.norm(gaussians, axis=2)
    zero = norms == 0
    while zero.any():
        gaussians[zero] = rng.standard_normal((int(zero.sum()), 4))
        norms = np.linalg.norm(gaussians, axis=2)
        zero = norms == 0
    points = gaussians / norms[..., None]
    y = np.einsum('k,ika->ia', rest, points)
    y2 = np.einsum('ia,ia->i', y, y)
    with np.errstate(divide='ignore'):
        return np.minimum(cap, 1. / y2)


def _block_sizes(num_samples: int) -> List[int]:
    full, last = divmod(num_samples, MC_BLOCK)
    return [MC_BLOCK] * full + ([last] if last else [])


def _validate_sampling(num_samples: int, seed: int):
    if num_samples < 1:
        raise ValueError(f'Number of samples must be positive (got {num_samples}).')
    if seed < 0:
        raise ValueError(f'Seed must be nonnegative (got {seed}).')


def monte_carlo_samples(a: Direction, num_samples: int,
                        seed: int = 0) -> np.ndarray:
    '''
    Parameters
    ----------
    a : Direction
    num_samples : int
    seed : int, optional

    Returns
    -------
    numpy.ndarray
        Raw Rao-Blackwellized samples, each in ``(0, a_1^-2]``.  Sample ``i``
        comes from block ``i // MC_BLOCK``, whose stream is seeded by
        ``(seed, block)``.
    '''
    _validate_sampling(num_samples, seed)
    return np.concatenate([_block_samples(a, seed, block, count)
                           for block, count in enumerate(_block_sizes(num_samples))])


def _block_moments(a: Direction, seed: int, block: int,
                   count: int) -> Tuple[int, float, float]:
    samples = _block_samples(a, seed, block, count)
    mean = float(samples.mean())
    return count, mean, float(((samples - mean) ** 2).sum())


def _merge_moments(parts: Iterable[Tuple[int, float, float]]) -> Tuple[int, float, float]:
    count, mean, m2 = 0, 0., 0.
    for count_b, mean_b, m2_b in parts:
        total = count + count_b
        delta = mean_b - mean
        mean += delta * count_b / total
        m2 += m2_b + delta * delta * count * count_b / total
        count = total
    return count, mean, m2


def volume_monte_carlo(a: Direction, num_samples: int, seed: int = 0,
                       n_jobs: Optional[int] = None) -> VolumeEstimate:
    '''
    Section volume by the Rao-Blackwellized Monte Carlo estimator.

    Parameters
    ----------
    a : Direction
    num_samples : int
        Total number of samples.
    seed : int, optional
        Nonnegative seed.  The result is bit-for-bit reproducible for a given
        seed, independent of ``n_jobs``.
    n_jobs : int, optional
        Worker threads used for blocks (default from ``POLYSLICE_THREADS``).

    Returns
    -------
    VolumeEstimate
        Error is the sample standard error; with a single sample, the bound
        ``a_1^-2 / 2`` on the standard deviation is reported instead (``0``
        for ``m <= 2``, where the estimator is deterministic).
    '''
    _validate_sampling(num_samples, seed)
    sizes = _block_sizes(num_samples)
    logger.debug('Drawing %d samples in %d blocks.', num_samples, len(sizes))
    parts = parallel_map(lambda item: _block_moments(a, seed, *item),
                         list(enumerate(sizes)), n_jobs=n_jobs)
    count, mean, m2 = _merge_moments(parts)
    if count > 1:
        error = math.sqrt(m2 / (count - 1) / count)
    elif a.m <= 2:
        # Every sample equals the exact value.
        error = 0.
    else:
        error = 0.5 * a.a1 ** -2
    return VolumeEstimate(mean, Method.MONTE_CARLO, error, count,
                          'rao_blackwell')


# Closed forms
# ------------
def _closed_form_n3(a1: float, a2: float, a3: float) -> Tuple[float, float]:
    cap = math.inf if a3 == 0 else a3 ** -2
    diff2 = (a1 - a2) ** 2
    cross = 4. * a1 * a2

    def integrand(phi):
        # sin^2(phi) / (a1^2 + a2^2 + 2 a1 a2 cos(phi)) in half angles.
        s, c = math.sin(0.5 * phi), math.cos(0.5 * phi)
        q = diff2 + cross * c * c
        sin2 = 4. * s * s * c * c
        return sin2 / q if q > 0 else 0.

    kink = math.pi
    if cross > 0 and math.isfinite(cap):
        x = (a3 * a3 - a1 * a1 - a2 * a2) / (2. * a1 * a2)
        if x > -1:
            kink = math.acos(x)
    value, error = si.quad(integrand, 0., kink, epsabs=1e-13, epsrel=1e-13,
                           limit=200)
    if kink < math.pi:
        # Capped part, integral of sin^2 over [kink, pi].
        value += cap * 0.5 * (math.pi - kink + math.sin(kink) * math.cos(kink))
    return 2. / math.pi * value, 2. / math.pi * error


def volume_closed_form_n3(a: Direction) -> float:
    '''
    Parameters
    ----------
    a : Direction
        Direction with ``n == 3``.

    Returns
    -------
    float
        ``int_0^pi (2/pi) sin^2(phi) min{(a_1^2 + a_2^2 + 2 a_1 a_2
        cos(phi))^-1, a_3^-2} dphi``, with the kink of the minimum as a
        panel boundary.
    '''
    if a.n != 3:
        raise DimensionMismatch(f'Closed form needs n=3 (got n={a.n}).')
    return _closed_form_n3(*a.weights)[0]


def volume_dominant(a: Direction) -> Optional[VolumeEstimate]:
    '''
    Returns
    -------
    VolumeEstimate or None
        ``a_1^-2`` exactly when ``a_1 >= a_2 + ... + a_n`` (then
        ``|a_2 xi_2 + ... + a_n xi_n| <= a_1`` surely), otherwise ``None``.
    '''
    if a.a1 >= math.fsum(a.weights[1:]):
        return VolumeEstimate(a.a1 ** -2, Method.CLOSED_FORM, 0., 0, 'dominant')
    return None


def _closed_form(a: Direction) -> Optional[VolumeEstimate]:
    m = a.m
    if m == 1:
        return VolumeEstimate(1., Method.CLOSED_FORM, 0., 0, 'exact_n1')
    if m == 2:
        return VolumeEstimate(a.a1 ** -2, Method.CLOSED_FORM, 0., 0, 'exact_n2')
    dominant = volume_dominant(a)
    if dominant is not None:
        return dominant
    if m == 3:
        value, error = _closed_form_n3(*a.effective)
        return VolumeEstimate(value, Method.CLOSED_FORM, error, 0, 'lemma2_n3')
    return None


def volume_auto(a: Direction,
                cfg: Optional[QuadratureConfig] = None) -> VolumeEstimate:
    '''
    Section volume by the most accurate available engine.

    Dispatch is on the effective dimension ``m``: ``m = 1`` gives ``1``,
    ``m = 2`` gives ``a_1^-2``, dominant directions give ``a_1^-2``, ``m = 3``
    uses :func:`volume_closed_form_n3` and anything else
    :func:`volume_quadrature`.
    '''
    closed = _closed_form(a)
    if closed is not None:
        return closed
    return volume_quadrature(a, cfg)


def volume(a: Direction, method: str = 'auto',
           cfg: Optional[QuadratureConfig] = None, samples: int = 100000,
           seed: int = 0, n_jobs: Optional[int] = None) -> VolumeEstimate:
    '''
    Parameters
    ----------
    a : Direction
    method : str, optional
        One of ``quad``, ``mc``, ``closed`` or ``auto``.
    cfg : QuadratureConfig, optional
        Quadrature configuration (``quad`` and ``auto``).
    samples, seed, n_jobs : int, optional
        Monte Carlo parameters (``mc``).

    Raises
    ------
    DimensionMismatch
        If ``method='closed'`` and no closed form applies.
    '''
    if method == 'quad':
        return volume_quadrature(a, cfg)
    elif method == 'mc':
        return volume_monte_carlo(a, samples, seed=seed, n_jobs=n_jobs)
    elif method == 'closed':
        closed = _closed_form(a)
        if closed is None:
            raise DimensionMismatch(f'No closed form for effective dimension '
                                    f'{a.m} (non-dominant direction).')
        return closed
    elif method == 'auto':
        return volume_auto(a, cfg)
    raise ValueError(f'Unknown method `{method}`.')


# Psi
# ---
def _psi_edges(zeros: Tuple[float, ...], width: float) -> np.ndarray:
    bounds = np.concatenate(([0.], zeros))
    pieces = []
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        count = max(1, math.ceil((hi - lo) / width))
        pieces.append(np.linspace(lo, hi, count + 1)[:-1])
    pieces.append(bounds[-1:])
    return np.concatenate(pieces)


def _psi_tail_bound(s: float, cutoff: float) -> float:
    power = 1.5 * s - 2.
    return math.exp(math.log(0.25 * s) + s * math.log(C_ENV)
                    - power * math.log(cutoff) - math.log(power))


def _psi_averaging_remainder(s: float, cutoff: float) -> float:
    '''
    Bound on the error of replacing ``|cos(theta)|^s`` by its mean in the
    tail beyond a zero of ``J_1``.
    '''
    return math.exp(math.log(0.25 * s * math.pi ** 2 * 1.5 * s)
                    + 0.5 * s * math.log(8. / math.pi) - 1.5 * s * math.log(cutoff))


def _psi_average_tail(s: float, cutoff: float, epsabs: float) -> Tuple[float, float]:
    '''
    ``(s/4) mu_s int_cutoff^inf (2 M_1(t) / t)^s t dt`` where ``M_1`` is the
    Bessel modulus and ``mu_s`` the mean of ``|cos|^s``.
    '''
    power = 1.5 * s - 2.

    def correction(t):
        if t > 1e6:
            excess = math.expm1(0.5 * s * math.log1p(3. / (8. * t * t)))
        else:
            excess = math.expm1(0.5 * s * math.log(0.5 * math.pi * t
                                                   * bessel_modulus(t) ** 2))
        return t ** (1. - 1.5 * s) * excess

    factor = 0.25 * s * abs_cos_mean(s) * (8. / math.pi) ** (0.5 * s)
    correction_value, correction_error = _quad(correction, cutoff, np.inf,
                                               epsabs / factor)
    lead = cutoff ** -power / power
    return factor * (lead + correction_value), factor * correction_error


def _psi_closure_zero_count(s: float, target: float) -> int:
    # Smallest K with remainder(K pi) < target; j_K > K pi.
    log_cutoff = (math.log(_psi_averaging_remainder(s, 1.)) - math.log(target)) / (1.5 * s)
    if log_cutoff > math.log(PSI_CLOSURE_MAX_ZEROS * math.pi):
        return PSI_CLOSURE_MAX_ZEROS
    return max(1, math.ceil(math.exp(log_cutoff) / math.pi))


def psi(s: float, cfg: Optional[QuadratureConfig] = None) -> PsiValue:
    '''
    Special function ``Psi(s) = (s / 4) int_0^inf |2 J_1(t) / t|^s t dt``.

    The integral is split at the zeros of ``J_1``, with each interval cut
    into sub-panels of width at most ``panel_width_factor * min(pi,
    4 / sqrt(s))``.  The tail beyond the last zero is bounded rigorously by
    the kernel envelope or, when that needs more than ``max_panels`` zeros,
    closed by averaging ``|cos|^s`` over the Bessel phase.

    Parameters
    ----------
    s : float
        Exponent, ``s >= 1.4``.
    cfg : QuadratureConfig, optional
        Defaults to ``abs_tol=1e-7``.

    Returns
    -------
    PsiValue

    Raises
    ------
    DomainError
        If ``s <= 4/3`` (the integral diverges).
    SlowConvergence
        If ``4/3 < s < 1.4``.
    TolNotReached
        If the tolerance is missed.


    .. versionchanged:: 0.1.0
        Added period-average tail closure for small ``s``.
    '''
    cfg = cfg or DEFAULT_PSI_CONFIG
    if not (math.isfinite(s) and s > PSI_DOMAIN_MIN):
        raise DomainError(f'Psi(s) diverges for s <= 4/3 (got s={s}).')
    if s < PSI_SLOW_MIN:
        raise SlowConvergence(f'Psi(s) converges too slowly for s < '
                              f'{PSI_SLOW_MIN} (got s={s}).')

    def integrand(t):
        return 0.25 * s * np.abs(kernel(t)) ** s * t

    width = cfg.panel_width_factor * min(math.pi, 4. / math.sqrt(s))
    power = 1.5 * s - 2.
    log_cutoff = (math.log(0.25 * s) + s * math.log(C_ENV) - math.log(power)
                  - math.log(0.5 * cfg.abs_tol)) / power

    if log_cutoff <= math.log(cfg.max_panels * math.pi):
        # j_K > K pi, so K = ceil(T / pi) zeros reach past T.
        count = max(1, math.ceil(math.exp(log_cutoff) / math.pi))
        zeros = j1_zeros(count)
        edges = _psi_edges(zeros, width)
        value, panel_error = _integrate_panels(integrand, edges,
                                               cfg.nodes_per_panel)
        error = panel_error + _psi_tail_bound(s, zeros[-1])
        route = 'rigorous_tail'
    elif not cfg.tail_closure:
        zeros = j1_zeros(cfg.max_panels)
        edges = _psi_edges(zeros, width)
        value, panel_error = _integrate_panels(integrand, edges,
                                               cfg.nodes_per_panel)
        error = panel_error + _psi_tail_bound(s, zeros[-1])
        raise TolNotReached(value, error, cfg.abs_tol, len(edges) - 1)
    else:
        count = _psi_closure_zero_count(s, 0.25 * cfg.abs_tol)
        zeros = j1_zeros(count)
        edges = _psi_edges(zeros, width)
        value, panel_error = _integrate_panels(integrand, edges,
                                               cfg.nodes_per_panel)
        tail, tail_error = _psi_average_tail(s, zeros[-1], 0.25 * cfg.abs_tol)
        value += tail
        error = (panel_error + tail_error
                 + _psi_averaging_remainder(s, zeros[-1]))
        route = 'average_tail'
        logger.debug('Psi(%g): phase-average tail beyond zero %d (T=%g).', s,
                     count, zeros[-1])

    if error > cfg.abs_tol:
        logger.warning('Psi(%g) error %g exceeds tolerance %g.', s, error,
                       cfg.abs_tol)
        raise TolNotReached(value, error, cfg.abs_tol, len(edges) - 1)
    return PsiValue(s, value, error, route, len(edges) - 1)
