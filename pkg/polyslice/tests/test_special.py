# coding: utf-8
import math

import numpy as np
import pytest
import scipy.special as ss

from polyslice.special import (C_ENV, ENVELOPE, SERIES_SWITCH, abs_cos_mean,
                               bessel_j1, bessel_modulus, j1_zeros, kernel,
                               series_switch_agreement, tail_envelope)

FIRST_ZERO = 3.8317059702


def test_bessel_j1_origin():
    assert bessel_j1(0.) == 0.


def test_bessel_j1_small_argument():
    assert abs(bessel_j1(1e-3) - 5e-4 * (1 - 1e-6 / 8)) <= 1e-16


def test_bessel_j1_first_zero():
    assert abs(bessel_j1(FIRST_ZERO)) <= 1e-9


def test_bessel_j1_odd():
    t = np.linspace(0.1, 20., 50)
    assert np.array_equal(bessel_j1(-t), -bessel_j1(t))


def test_bessel_j1_matches_library():
    t = np.linspace(-SERIES_SWITCH, 50., 2001)
    assert np.allclose(bessel_j1(t), ss.j1(t), rtol=1e-13, atol=1e-16)


def test_series_switch_agreement():
    assert series_switch_agreement() <= 1e-12


def test_kernel_origin_and_zero():
    assert kernel(0.) == 1.
    assert abs(kernel(FIRST_ZERO)) <= 1e-9


def test_kernel_bounded():
    u = np.linspace(0., 200., 20001)
    assert np.all(np.abs(kernel(u)) <= 1.)


def test_kernel_small_argument_expansion():
    u = np.linspace(0., 0.5, 101)
    assert np.all(np.abs(kernel(u) - (1 - u ** 2 / 8 + u ** 4 / 192)) <= u ** 6 + 1e-16)


def test_kernel_even():
    u = np.linspace(0.1, 30., 40)
    assert np.array_equal(kernel(-u), kernel(u))


def test_j1_zeros_values():
    zeros = j1_zeros(2)
    assert abs(zeros[0] - FIRST_ZERO) <= 1e-10
    assert abs(zeros[1] - 7.0155866698) <= 1e-10


def test_j1_zeros_against_library():
    assert np.allclose(j1_zeros(100), ss.jn_zeros(1, 100), rtol=0, atol=1e-10)


def test_j1_zeros_spacing():
    zeros = j1_zeros(50)
    assert abs(zeros[49] - zeros[48] - math.pi) <= 0.01
    assert all(b > a for a, b in zip(zeros[:-1], zeros[1:]))


def test_j1_alternates_between_zeros():
    zeros = np.array(j1_zeros(30))
    midpoints = 0.5 * (zeros[:-1] + zeros[1:])
    signs = np.sign(bessel_j1(midpoints))
    assert np.all(signs[:-1] == -signs[1:])


def test_j1_zeros_cached():
    assert j1_zeros(7) is j1_zeros(7)
    assert isinstance(j1_zeros(7), tuple)


def test_j1_zeros_invalid():
    with pytest.raises(ValueError):
        j1_zeros(0)


def test_tail_envelope_values():
    assert tail_envelope(0.5) == 1.
    assert tail_envelope(ENVELOPE.t_switch * 0.999) == 1.
    assert np.isclose(tail_envelope(100.), C_ENV * 1e-3, rtol=1e-14)


def test_envelope_dominates_kernel():
    assert C_ENV >= 2 * math.sqrt(2 / math.pi)
    assert ENVELOPE.validate(np.geomspace(0.01, 1e5, 200001)) >= 0


def test_bessel_modulus():
    t = np.array([1., 5., 50.])
    expected = np.sqrt(ss.j1(t) ** 2 + ss.y1(t) ** 2)
    assert np.allclose(bessel_modulus(t), expected, rtol=1e-13)
    # pi t M^2 / 2 -> 1.
    assert abs(0.5 * math.pi * 1e4 * bessel_modulus(1e4) ** 2 - 1) <= 1e-8


@pytest.mark.parametrize('s, expected', [(2., 0.5), (4., 3. / 8.),
                                         (1., 2. / math.pi)])
def test_abs_cos_mean(s, expected):
    assert np.isclose(abs_cos_mean(s), expected, rtol=1e-14)


def test_bessel_j1_negative_lobes():
    # J_1 is negative on (j_1, j_2) and (j_3, j_4).
    t = np.array([5., 12.])
    assert np.all(bessel_j1(t) < 0)
    assert np.allclose(bessel_j1(t), ss.j1(t), rtol=1e-14)
    assert bessel_j1(-5.) > 0


def test_envelope_covers_first_maximum():
    u = np.linspace(1.5, 3., 30001)
    amplitude = 2 * np.sqrt(u) * np.abs(ss.j1(u))
    assert amplitude.max() > 1.65
    assert C_ENV >= amplitude.max()
    assert np.all(tail_envelope(u) >= np.abs(kernel(u)))
