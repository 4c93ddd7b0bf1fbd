import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from leafmetric.disc import (HyperbolicRadius, disc_automorphism, euclidean_radius,
                             hyperbolic_radius, hyperbolic_radius_from_gap, log_star,
                             poincare_distance, pseudo_hyperbolic, radius_gap)

disc_point = st.builds(lambda r, a: r * complex(math.cos(a), math.sin(a)),
                       st.floats(0, 0.99), st.floats(0, 2 * math.pi))


@settings(max_examples=200)
@given(disc_point, disc_point, disc_point)
def test_distance_is_automorphism_invariant(z, w, t):
    a = poincare_distance(z, w)
    b = poincare_distance(disc_automorphism(t, z), disc_automorphism(t, w))
    assert b == pytest.approx(a, rel=1e-8, abs=1e-10)


@settings(max_examples=200)
@given(disc_point, disc_point, disc_point)
def test_triangle_inequality(a, b, c):
    assert poincare_distance(a, c) <= poincare_distance(a, b) + poincare_distance(b, c) + 1e-9


def test_distance_from_origin_is_hyperbolic_radius():
    for r in (0.0, 0.1, 0.5, 0.9, 0.999):
        assert poincare_distance(0, r) == pytest.approx(hyperbolic_radius(r), rel=1e-14, abs=1e-15)


def test_infinitesimal_density():
    z, h = 0.6j, 1e-7
    assert poincare_distance(z, z + h) / h == pytest.approx(2 / (1 - 0.36), rel=1e-6)


def test_pseudo_hyperbolic_symmetry():
    assert pseudo_hyperbolic(0.3, -0.2j) == pytest.approx(pseudo_hyperbolic(-0.2j, 0.3))


def test_points_outside_the_disc_rejected():
    with pytest.raises(ValueError):
        poincare_distance(1.0, 0.0)


def test_radius_round_trips():
    R = np.linspace(0, 30, 301)
    assert np.allclose(hyperbolic_radius_from_gap(radius_gap(R)), R, rtol=0, atol=1e-14 * 30)
    r = np.linspace(0, 0.999, 200)
    assert np.allclose(euclidean_radius(hyperbolic_radius(r)), r, atol=1e-14)
    hr = HyperbolicRadius.from_hyperbolic(25.0)
    assert HyperbolicRadius.from_gap(hr.gap).R == pytest.approx(25.0, abs=1e-13)
    assert hr.r == pytest.approx(1 - hr.gap, abs=1e-16)


def test_log_star():
    assert log_star(1.0) == 1.0
    assert log_star(math.e) == pytest.approx(2.0)
    assert log_star(1 / math.e) == pytest.approx(2.0)
    with pytest.raises(ValueError):
        log_star(0.0)


def test_poincare_euclid_bound_is_tight_at_the_edge():
    # near the rim of D_R the ratio d_P / |z - w| approaches e^R / 2
    R = 6.0
    r = euclidean_radius(R)
    z = r - 1e-12
    w = z - math.exp(-R)
    ratio = poincare_distance(z, w) / abs(z - w)
    assert ratio <= math.exp(R)
    assert ratio >= 0.25 * math.exp(R)
