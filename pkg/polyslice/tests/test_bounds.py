# coding: utf-8
import math

import numpy as np
import pytest

from polyslice.bounds import (INV_SQRT2, LIPSCHITZ_CONSTANT, Region,
                              berry_esseen_bound, berry_esseen_upper,
                              classify_region, delta, fourier_product_upper,
                              gaussian_comparison, lipschitz_check,
                              lower_stability, psi_quantitative_bound,
                              stability_bounds, theorem1_upper,
                              two_dim_deficit_holds)
from polyslice.volume import (DimensionMismatch, Direction, DomainError, Method,
                              VolumeEstimate, canonicalize)


def _random_directions(n, count, seed=0):
    rng = np.random.default_rng(seed)
    return [canonicalize(x) for x in rng.standard_normal((count, n))]


@pytest.mark.parametrize('a', _random_directions(5, 10))
def test_delta_is_squared_distance(a):
    extremiser = np.zeros(a.n)
    extremiser[:2] = INV_SQRT2
    expected = np.sum((a.as_array() - extremiser) ** 2)
    assert abs(delta(a) - expected) <= 1e-14


def test_delta_needs_two_coordinates():
    with pytest.raises(DimensionMismatch):
        delta(Direction((1.,)))
    with pytest.raises(DimensionMismatch):
        classify_region(Direction((1.,)))


def test_gaussian_comparison():
    assert abs(gaussian_comparison(INV_SQRT2) - 2 * (1 - math.exp(-2))) <= 1e-12
    for a1 in (0., 1., 1.5):
        with pytest.raises(DomainError):
            gaussian_comparison(a1)


def test_berry_esseen_below_two():
    bound = berry_esseen_bound(math.sqrt(3 / 8), 6e-5)
    assert bound < 2 - 1e-5
    assert abs(bound - 1.98557) <= 1e-4


def test_berry_esseen_upper_uses_two_largest():
    a = canonicalize([3., 2., 1.])
    assert berry_esseen_upper(a) == berry_esseen_bound(a.a1, a.a2)


def test_lower_stability():
    assert lower_stability(Direction((1., 0.))) == 1.
    assert lower_stability(canonicalize([1., 1.])) == pytest.approx(1.5 - INV_SQRT2 / 2)


def test_theorem1_upper_below_two():
    for a in _random_directions(4, 5, seed=3):
        assert theorem1_upper(a) <= 2.


@pytest.mark.parametrize('s, expected', [(2., 1.),
                                         (8. / 3., 1. - 1. / 27.),
                                         (3., 1. - 1. / 453.)])
def test_psi_quantitative_bound(s, expected):
    assert psi_quantitative_bound(s) == pytest.approx(expected, rel=1e-15)


def test_psi_quantitative_bound_domain():
    with pytest.raises(DomainError):
        psi_quantitative_bound(1.9)


# Regions
# -------
def test_classify_coordinate_vector():
    assignment = classify_region(Direction((1., 0.)))
    assert assignment.tags == [Region.L13]
    assert assignment.direct_bound == 1.


def test_classify_extremiser():
    assignment = classify_region(canonicalize([1., 1., 0.]))
    assert Region.L7 in assignment.tags
    assert assignment.bounds[Region.L7] <= 2.
    assert Region.L8 not in assignment.tags


def test_classify_uniform():
    assignment = classify_region(canonicalize(np.ones(16)))
    assert assignment.tags == [Region.L8]
    assert assignment.minimum == pytest.approx(2 * math.exp(-1 / 16 / 151))


def test_classify_moderate():
    a = canonicalize([0.65, 0.3, 0.3, 0.3, 0.3, 0.3, 0.3])
    assignment = classify_region(a)
    assert Region.L10 in assignment.tags
    assert Region.C11 in assignment.tags


def test_classify_just_above_inverse_sqrt2():
    a1 = np.nextafter(INV_SQRT2, 1.)
    rest = math.sqrt(max(1. - a1 * a1 - 0.25, 0.))
    a = Direction((float(a1), 0.5, rest))
    assignment = classify_region(a)
    assert Region.L12 not in assignment.tags
    assert Region.L13 in assignment.tags


@pytest.mark.parametrize('n', [2, 3, 6, 20])
def test_regions_cover_directions(n):
    for a in _random_directions(n, 25, seed=n):
        assignment = classify_region(a)
        assert assignment.tags
        assert assignment.minimum <= 2.
        if Region.L13 in assignment.tags:
            # The L13 bound rounds to 2.0; the direct bound is strict.
            assert assignment.direct_bound < 2.
        if Region.L8 in assignment.tags:
            assert assignment.minimum < 2.


def test_region_assignment_as_dict():
    record = classify_region(canonicalize(np.ones(16))).as_dict()
    assert record['tags'] == ['L8']
    assert set(record) == {'tags', 'bounds', 'delta', 'direct_bound'}


# Fourier product
# ---------------
def test_fourier_product_needs_small_weights():
    assert fourier_product_upper(Direction((1., 0.))) == math.inf
    assert fourier_product_upper(canonicalize([3., 1.])) == math.inf


def test_fourier_product_uniform():
    bound = fourier_product_upper(canonicalize(np.ones(16)))
    assert bound <= 2 * (1 - 1 / 2416) + 1e-6


def test_fourier_product_extremiser():
    assert abs(fourier_product_upper(canonicalize([1., 1.])) - 2.) <= 2e-6


def test_fourier_product_skips_tiny_weights():
    weights = np.full(40000, 1.)
    assert fourier_product_upper(canonicalize(weights)) == pytest.approx(2., rel=1e-15)


# Lipschitz and two-dimensional deficit
# -------------------------------------
def test_lipschitz_check():
    a = Direction((1., 0.))
    b = Direction((0.8, 0.6))
    assert lipschitz_check(a, b, 1., 1 / 0.64)
    assert not lipschitz_check(a, b, 1., 1. + LIPSCHITZ_CONSTANT)


def test_lipschitz_check_adds_estimate_errors():
    a = Direction((1., 0.))
    b = Direction((0.8, 0.6))
    gap = LIPSCHITZ_CONSTANT * a.distance(b)
    far = VolumeEstimate(1. + gap + 0.5, Method.MONTE_CARLO, 1., 1000)
    assert not lipschitz_check(a, b, 1., far.value)
    assert lipschitz_check(a, b, 1., far)


def test_two_dim_deficit():
    for a in _random_directions(2, 20, seed=7):
        assert two_dim_deficit_holds(a)
    with pytest.raises(DimensionMismatch):
        two_dim_deficit_holds(canonicalize([1., 1., 1.]))


def test_stability_bounds():
    bounds = stability_bounds(canonicalize(np.ones(4)))
    assert bounds.lower_stab == 1.25
    assert bounds.gaussian is not None
    assert bounds.fourier_product < 2.
    assert bounds.upper_thm1 <= 2.
    record = bounds.as_dict()
    assert record['lipschitz_constant'] == LIPSCHITZ_CONSTANT


def test_stability_bounds_coordinate_vector():
    bounds = stability_bounds(Direction((1., 0.)))
    assert bounds.gaussian is None
    assert bounds.fourier_product == math.inf


def test_tiny_region_margins_round_to_two():
    assignment = classify_region(Direction((1., 0.)))
    assert assignment.bounds[Region.L13] == 2.
    assert assignment.minimum == 2.
    assert assignment.direct_bound == 1.


def test_fourier_product_near_slow_band():
    # a_1^-2 = 1.5625 needs the period-average tail of Psi.
    a = Direction((0.8, 0.6))
    bound = fourier_product_upper(a)
    assert math.isfinite(bound)
    assert bound >= a.a1 ** -2 - 1e-6
