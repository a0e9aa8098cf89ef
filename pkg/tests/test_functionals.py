from math import pi, sqrt

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from convsym.bodies import (Ball, PolygonBody, Segment, Translated, cube, cube3, random_polygon,
                             random_polytope3, rectangle, regular_polygon, regular_simplex)
from convsym.bodies.functionals import (BallGauge, admissible_cap_eps, ball_gauge,
                                        bokowski_heil_residual, corollary14_check,
                                        exact_mean_width_half, gauge, mean_width_half,
                                        small_cap_check, unit_ball_volume, urysohn_check, volume)
from convsym.geometry import make_rng

seeds = st.integers(0, 2**32 - 1)


def test_unit_ball_volumes():
    assert unit_ball_volume(2) == pytest.approx(pi)
    assert unit_ball_volume(3) == pytest.approx(4 * pi / 3)
    assert unit_ball_volume(4) == pytest.approx(pi**2 / 2)


def test_volumes():
    assert volume(Ball(3, 2.0)) == pytest.approx(32 * pi / 3)
    assert volume(cube(3)) == pytest.approx(8.0)
    assert volume(Segment([1.0, 1.0])) == 0.0
    assert volume(regular_simplex(2)) == pytest.approx(3 * sqrt(3) / 4)
    assert volume(rectangle(4, 1)) == pytest.approx(4.0)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_mean_width_of_cube(n, grids):
    # M*(cube [-1,1]^n) = n E|x_1|
    from convsym.geometry import abs_moment
    g = grids[n]
    assert mean_width_half(cube(n), g) == pytest.approx(n * abs_moment(n), abs=n * g.tau)


def test_exact_mean_width():
    assert exact_mean_width_half(Ball(3, 2.0)) == 2.0
    assert exact_mean_width_half(cube3()) == pytest.approx(1.5)
    assert exact_mean_width_half(rectangle(2, 2)) == pytest.approx(4 / pi)
    assert exact_mean_width_half(cube(5)) is None


def test_ball_gauge(grids):
    g = grids[3]
    gb = ball_gauge(Ball(3, 2.0), g)
    assert gb.r_in == pytest.approx(2.0) and gb.r_out == pytest.approx(2.0)
    assert gb.eps_distance == pytest.approx(0.0, abs=1e-12)
    gc = ball_gauge(cube(3), g)
    assert gc.r_in <= gc.mean_width_half <= gc.r_out
    with pytest.raises(ValueError):
        ball_gauge(Translated(Ball(3), np.array([2.0, 0.0, 0.0])), g)
    flat = ball_gauge(Segment([1.0, 0.0, 0.0]), g, allow_flat=True)
    # no node lies exactly on the equator, so r_in is small but positive
    assert flat.r_in < 2 * g.mesh_size and flat.eps_distance > 0.99
    with pytest.raises(ValueError):
        BallGauge(2.0, 1.0, 1.5, 0.1)


@settings(max_examples=40, deadline=None)
@given(seed=seeds)
def test_polygon_gauge_brackets(seed):
    p = random_polygon(make_rng(seed), 10)
    gg = gauge(p)
    assert gg.r_in <= gg.mean_width_half <= gg.r_out
    assert gg.caveat == "exact"


# ---------------------------------------------------------------------------
# inequalities


def test_residual_equality_for_ball():
    r = bokowski_heil_residual(Ball(2))
    assert abs(r.value) <= r.tolerance
    r = bokowski_heil_residual(Ball(3))
    assert abs(r.value) <= r.tolerance


def test_residual_for_square():
    # square of area pi: R = sqrt(pi/2), M* = 4a/pi with a = sqrt(pi)/2
    sq = rectangle(2, 2).normalized_area()
    r = bokowski_heil_residual(sq)
    R = sqrt(pi / 2)
    expected = 1 + 3 * R**2 - 4 * R * (4 * (sqrt(pi) / 2) / pi)
    assert r.value == pytest.approx(expected)
    assert r.holds


@settings(max_examples=60, deadline=None)
@given(seed=seeds)
def test_residual_nonnegative_polygons(seed):
    p = random_polygon(make_rng(seed), 9)
    assert bokowski_heil_residual(p).holds
    c = corollary14_check(p.normalized_area())
    assert c.holds and c.sharp_holds is not False
    assert urysohn_check(p.normalized_area())


@settings(max_examples=15, deadline=None)
@given(seed=seeds)
def test_residual_nonnegative_polytopes(seed):
    p = random_polytope3(make_rng(seed), 14)
    assert bokowski_heil_residual(p).holds
    p = p.normalized_volume()
    assert corollary14_check(p)
    assert urysohn_check(p)


def test_sharp_mean_width_ball_probe():
    d = regular_polygon(4096).normalized_area()
    res = corollary14_check(d, eps=1e-2)
    assert res.holds and res.sharp_holds
    with pytest.raises(ValueError):
        corollary14_check(rectangle(3, 1).normalized_area(), eps=1e-3)
    with pytest.raises(ValueError):
        corollary14_check(rectangle(3, 1))


def test_urysohn_square():
    sq = rectangle(2, 2).normalized_area()
    res = urysohn_check(sq)
    assert res.value == pytest.approx(2 / sqrt(pi))
    assert res.holds


def test_small_cap(grids):
    eps = 0.5
    c7 = 1 / 30
    inside = 1 + (c7 * eps) ** 2
    near = regular_polygon(512, radius=1.0)
    res = small_cap_check(near.scaled(inside / near.circumradius()), eps, grids[2])
    assert res.applicable and res.holds
    assert small_cap_check(rectangle(4, 1), eps, grids[2]).applicable is False
    assert small_cap_check(Ball(3), 0.2, grids[3]).holds
    assert admissible_cap_eps(1.0 + (c7 * 0.3) ** 2, 2) == pytest.approx(0.3)
    assert admissible_cap_eps(0.9, 3) == 0.0
