# coding: utf-8
import numpy as np
import pytest
import scipy.integrate as si

from polyslice.special import kernel
from polyslice.volume import (DomainError, QuadratureConfig, SlowConvergence,
                              TolNotReached, psi)


def test_psi_two():
    value = psi(2.)
    assert abs(value.value - 1) <= 1e-6
    assert value.route == 'average_tail'
    assert value.error <= 1e-7


def test_psi_quantitative_branch():
    value = psi(2.2)
    assert value.value <= 1 - 0.04 / 12 + 1e-6


def test_psi_large_exponent():
    value = psi(200.)
    assert 0.9 <= value.value <= 1 - 1 / 30200 + 1e-6
    assert value.route == 'rigorous_tail'


def test_psi_against_adaptive_integration():
    # |k|^6 is smooth, so plain adaptive quadrature converges.
    reference, _ = si.quad(lambda t: 1.5 * kernel(t) ** 6 * t, 0., 200.,
                           limit=1000, epsabs=1e-12, epsrel=0)
    assert abs(psi(6.).value - reference) <= 1e-7


@pytest.mark.parametrize('s', [2.05, 2.5, 3., 10., 60.])
def test_psi_at_most_one(s):
    value = psi(s)
    assert value.value <= 1 + value.error


@pytest.mark.parametrize('s', [4. / 3., 1.3, 1., -2.])
def test_psi_domain(s):
    with pytest.raises(DomainError):
        psi(s)


def test_psi_slow_band():
    with pytest.raises(SlowConvergence):
        psi(1.35)


def test_psi_without_tail_closure():
    with pytest.raises(TolNotReached):
        psi(2., QuadratureConfig(abs_tol=1e-7, max_panels=16, tail_closure=False))


def test_psi_routes_agree():
    # s = 2.6 is close to the switch between the rigorous and averaged tails.
    rigorous = psi(2.6, QuadratureConfig(abs_tol=1e-6, max_panels=4096))
    averaged = psi(2.6, QuadratureConfig(abs_tol=1e-6, max_panels=64))
    assert abs(rigorous.value - averaged.value) <= rigorous.error + averaged.error


@pytest.mark.parametrize('s', [1.4, 1.45, 1.6])
def test_psi_near_slow_band(s):
    value = psi(s)
    assert value.route == 'average_tail'
    assert value.error <= 1e-7
    assert value.value > 0.9
