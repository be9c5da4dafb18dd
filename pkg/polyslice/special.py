# coding: utf-8
"""
Bessel kernel ``2 J_1(u) / u``, zeros of ``J_1`` and explicit tail envelopes.

Both integral engines in :mod:`polyslice.volume` (the section-volume Fourier
integral and the special function :math:`\\Psi`) are built on the functions
in this module.
"""
import logging
import math

from dataclasses import dataclass
from functools import lru_cache
from typing import Tuple, Union

import numpy as np
import scipy.optimize as so
import scipy.special as ss

__all__ = ['C_ENV', 'SERIES_SWITCH', 'KernelEnvelope', 'ENVELOPE', 'bessel_j1',
           'kernel', 'j1_zeros', 'tail_envelope', 'series_switch_agreement',
           'bessel_modulus', 'abs_cos_mean']

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

#: Envelope constant, ``|2 J_1(u) / u| <= C_ENV * u ** -1.5`` for ``u > 0``.
#: The local maxima of ``2 sqrt(u) |J_1(u)|`` decrease towards
#: ``2 sqrt(2 / pi) ~ 1.5958``; the first one, ``~1.6501`` near ``u = 2.166``,
#: is the largest.
C_ENV = 1.66

#: Arguments ``|t| <= SERIES_SWITCH`` are summed from the power series.
SERIES_SWITCH = 2.0

# Terms of the series kept for `|t| <= SERIES_SWITCH`; the last term is below
# 1e-25 relative to the first.
_SERIES_TERMS = 16


@dataclass(frozen=True)
class KernelEnvelope:
    """
    Explicit decay envelope ``min(1, c_env * u ** -1.5)`` of the kernel.

    Attributes
    ----------
    c_env : float
        Algebraic envelope constant.
    t_switch : float
        Point ``c_env ** (2 / 3)`` beyond which the algebraic bound is
        smaller than the trivial bound ``1``.
    """
    c_env: float
    t_switch: float

    def __call__(self, u: ArrayLike) -> ArrayLike:
        u = np.asarray(u, dtype=float)
        with np.errstate(divide='ignore'):
            value = np.minimum(1.0, self.c_env * u ** -1.5)
        return value if value.ndim else float(value)

    def validate(self, grid: np.ndarray) -> float:
        """
        Parameters
        ----------
        grid : numpy.ndarray
            Positive validation points.

        Returns
        -------
        float
            Smallest slack ``envelope(u) - |kernel(u)|`` over the grid.  The
            envelope is valid on the grid iff the result is nonnegative.
        """
        grid = np.asarray(grid, dtype=float)
        return float(np.min(self(grid) - np.abs(kernel(grid))))


ENVELOPE = KernelEnvelope(c_env=C_ENV, t_switch=C_ENV ** (2. / 3.))


def _kernel_series(u: np.ndarray) -> np.ndarray:
    """
    Sum ``2 J_1(u) / u = sum_k (-1)^k (u^2 / 4)^k / (k! (k + 1)!)``.
    """
    q = -0.25 * u * u
    term = np.ones_like(u)
    total = np.ones_like(u)
    for k in range(1, _SERIES_TERMS):
        term = term * q / (k * (k + 1))
        total = total + term
    return total


def bessel_j1(t: ArrayLike) -> ArrayLike:
    """
    Bessel function of the first kind of order one.

    Parameters
    ----------
    t : float or numpy.ndarray
        Finite argument(s).  Negative arguments use the odd extension.

    Returns
    -------
    float or numpy.ndarray
        ``J_1(t)``.  Arguments with ``|t| <= SERIES_SWITCH`` are summed from
        the power series; larger arguments use the Cephes rational and
        asymptotic evaluator from :mod:`scipy.special`.
    """
    t = np.asarray(t, dtype=float)
    x = np.abs(t)
    small = x <= SERIES_SWITCH
    result = np.empty_like(x)
    result[small] = 0.5 * x[small] * _kernel_series(x[small])
    result[~small] = ss.j1(x[~small])
    result = np.where(t < 0, -result, result)
    return result if result.ndim else float(result)


def kernel(u: ArrayLike) -> ArrayLike:
    """
    Fourier factor ``2 J_1(u) / u`` of the uniform measure on :math:`S^3`.

    Parameters
    ----------
    u : float or numpy.ndarray
        Argument(s); the kernel is even, so the sign is ignored.

    Returns
    -------
    float or numpy.ndarray
        Kernel value(s), with the removable singularity filled
        (``kernel(0) == 1``).  Always within ``[-1, 1]``.
    """
    u = np.abs(np.asarray(u, dtype=float))
    small = u <= SERIES_SWITCH
    result = np.empty_like(u)
    result[small] = _kernel_series(u[small])
    large = u[~small]
    result[~small] = 2. * ss.j1(large) / large
    return result if result.ndim else float(result)


def tail_envelope(u: ArrayLike) -> ArrayLike:
    """
    Returns
    -------
    float or numpy.ndarray
        ``min(1, C_ENV * u ** -1.5)``, an upper bound of ``|kernel(u)|``
        for ``u > 0``.
    """
    return ENVELOPE(u)


def series_switch_agreement() -> float:
    """
    Returns
    -------
    float
        Absolute difference between the series branch and the library branch
        of :func:`bessel_j1` at :data:`SERIES_SWITCH`.
    """
    x = np.array([SERIES_SWITCH])
    return float(abs(0.5 * x[0] * _kernel_series(x)[0] - ss.j1(x[0])))


@lru_cache(maxsize=None)
def _j1_zero(k: int) -> float:
    # McMahon's expansion for the k-th zero, (k + 1/4) pi - 3 / (8 beta).
    beta = (k + 0.25) * math.pi
    guess = beta - 3. / (8. * beta)
    lo, hi = guess - 0.05, guess + 0.05
    if bessel_j1(lo) * bessel_j1(hi) > 0:
        # Zero is always inside `(k pi, (k + 1/2) pi)`.
        lo, hi = k * math.pi, (k + 0.5) * math.pi
    return so.brentq(bessel_j1, lo, hi, xtol=1e-14, maxiter=200)


@lru_cache(maxsize=64)
def j1_zeros(m: int) -> Tuple[float, ...]:
    """
    Parameters
    ----------
    m : int
        Number of zeros, ``m >= 1``.

    Returns
    -------
    tuple
        First ``m`` positive zeros of ``J_1`` in increasing order.
    """
    if m < 1:
        raise ValueError(f'Number of zeros must be positive (got {m}).')
    logger.debug('Computing %d zeros of J_1.', m)
    return tuple(_j1_zero(k) for k in range(1, m + 1))


def bessel_modulus(t: ArrayLike) -> ArrayLike:
    """
    Returns
    -------
    float or numpy.ndarray
        Bessel modulus ``M_1(t) = |H_1^(1)(t)| = sqrt(J_1(t)^2 + Y_1(t)^2)``,
        so that ``J_1(t) = M_1(t) cos(theta_1(t))`` with a smooth phase.
    """
    value = np.abs(ss.hankel1(1, np.asarray(t, dtype=float)))
    return value if np.ndim(value) else float(value)


def abs_cos_mean(s: float) -> float:
    """
    Returns
    -------
    float
        Mean of ``|cos(theta)| ** s`` over a period,
        ``Gamma((s + 1) / 2) / (sqrt(pi) Gamma(s / 2 + 1))``.
    """
    return math.exp(math.lgamma(0.5 * (s + 1.)) - math.lgamma(0.5 * s + 1.)) / math.sqrt(math.pi)
