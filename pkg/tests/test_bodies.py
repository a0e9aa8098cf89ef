from math import pi, sqrt

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from convsym.bodies import (Ball, GridBody, PolygonBody, Polytope, PolytopeBody3, Segment, Zonotope,
                             box, chord_lengths, cube, cube3, cube_polytope, decimate,
                             minkowski_symmetrize, orthogonal_symmetrize, random_polygon,
                             random_polytope3, rectangle, regular_polygon, regular_simplex,
                             restore_area, sampled_ball, seed_body, steiner_symmetrize_polygon,
                             steiner_symmetrize_sampled3)
from convsym.bodies.polygon import convex_hull_2d
from convsym.bodies.support import ReflectedAverage, recenter, sample_on, steiner_point
from convsym.experiments.minkowski import diagonal_basis
from convsym.geometry import make_rng, reflect, sample_haar_basis, sample_uniform_sphere, unit
from convsym.harmonics import orthogonal_symmetrize_function

seeds = st.integers(0, 2**32 - 1)


# ---------------------------------------------------------------------------
# support functions


def test_basic_support_values(rng):
    v = sample_uniform_sphere(rng, 3, size=50)
    assert np.allclose(Ball(3, 2.0).support(v), 2.0)
    assert np.allclose(cube(3).support(v), np.abs(v).sum(axis=1))
    assert np.allclose(cube_polytope(3).support(v), np.abs(v).sum(axis=1))
    assert np.allclose(Segment([0.0, 0.0, 2.0]).support(v), 2 * np.abs(v[:, 2]))
    with pytest.raises(ValueError):
        cube(3).support(np.ones(2))


@settings(max_examples=30, deadline=None)
@given(seed=seeds)
def test_support_positively_homogeneous_and_subadditive(seed):
    r = make_rng(seed)
    body = Polytope(r.standard_normal((8, 3)))
    x, y = r.standard_normal(3), r.standard_normal(3)
    a = r.uniform(0, 5)
    assert np.isclose(body.support(a * x), a * body.support(x))
    assert body.support(x + y) <= body.support(x) + body.support(y) + 1e-12


def test_simplex_is_regular():
    s = regular_simplex(3)
    d = np.linalg.norm(s.vertices[:, None] - s.vertices[None], axis=-1)
    off = d[~np.eye(4, dtype=bool)]
    assert np.allclose(off, off[0])
    assert np.allclose(s.vertices.mean(axis=0), 0, atol=1e-12)
    assert np.allclose(np.linalg.norm(s.vertices, axis=1), 1.0)
    assert s.inradius() == pytest.approx(1 / 3)


def test_zonotope_inradius():
    assert cube(3).inradius() == pytest.approx(1.0)
    assert box(4).inradius() == pytest.approx(0.5)
    assert Segment([1.0, 0.0, 0.0]).inradius() == 0.0
    assert Zonotope(np.array([[1.0, 0, 0], [0, 1.0, 0]])).inradius() == 0.0


def test_seed_bodies():
    for name in ("ball", "cube", "simplex", "segment", "cross", "box"):
        assert seed_body(name, 3).dim == 3
    with pytest.raises(ValueError):
        seed_body("torus", 3)


# ---------------------------------------------------------------------------
# Minkowski and orthogonal symmetrization


@settings(max_examples=30, deadline=None)
@given(seed=seeds)
def test_minkowski_symmetrization_averages_reflection(seed):
    r = make_rng(seed)
    u = sample_uniform_sphere(r, 3)
    z = Zonotope(r.standard_normal((4, 3)))
    v = sample_uniform_sphere(r, 3, size=20)
    sym = minkowski_symmetrize(z, u)
    expected = 0.5 * (z.support(v) + z.support(reflect(v, u)))
    assert np.allclose(sym.support(v), expected)
    # zonotope route and lazy route agree
    lazy = ReflectedAverage(z, u)
    assert np.allclose(lazy.support(v), sym.support(v))
    # the symmetral is symmetric about u^perp
    assert np.allclose(sym.support(v), sym.support(reflect(v, u)))


def test_minkowski_symmetrization_ball_fixed():
    b = Ball(3, 1.5)
    assert minkowski_symmetrize(b, [0.0, 0.0, 1.0]) is b


@pytest.mark.parametrize("n", [2, 3, 4])
def test_orthogonal_symmetrize_preserves_mean_width(n, grids, rng):
    g = grids[n]
    body = regular_simplex(n)
    m0 = g.integrate(body.support(g.nodes))
    out = orthogonal_symmetrize(body, sample_haar_basis(rng, n), g)
    assert isinstance(out, GridBody)
    assert abs(g.integrate(out.values) - m0) <= 2 * g.tau * m0


def test_orthogonal_symmetrize_ball_and_invariance(grids, rng):
    g = grids[3]
    out = orthogonal_symmetrize(Ball(3), sample_haar_basis(rng, 3), g)
    assert np.allclose(out.values, 1.0, atol=1e-12)
    U = sample_haar_basis(rng, 3)
    body = regular_simplex(3)
    out = orthogonal_symmetrize(body, U, g)
    # node values are the sign-flip average of the exact support function
    direct = orthogonal_symmetrize_function(body.support, U, g.nodes)
    assert np.allclose(out.values, direct, atol=1e-12)
    # and every sign flip of the basis fixes that average
    D = U @ np.diag([-1.0, 1.0, 1.0]) @ U.T
    flipped = orthogonal_symmetrize_function(body.support, U, g.nodes @ D)
    assert np.allclose(flipped, direct, atol=1e-12)


def test_orthogonal_symmetrize_segment_diagonal_basis(grids):
    # [-e1, e1] under the 45 degree basis becomes the square with h = (|x|+|y|)/2
    g = grids[2]
    out = orthogonal_symmetrize(Segment([1.0, 0.0]), diagonal_basis(2), g)
    assert np.allclose(out.values, 0.5 * np.abs(g.nodes).sum(axis=1), atol=1e-12)
    # the standard basis leaves the segment unchanged
    out = orthogonal_symmetrize(Segment([1.0, 0.0]), np.eye(2), g)
    assert np.allclose(out.values, np.abs(g.nodes[:, 0]), atol=1e-12)


def test_orthogonal_symmetrize_matches_minkowski_composition(grids, rng):
    # the sign-flip average equals n successive Minkowski symmetrizations
    g = grids[3]
    U = sample_haar_basis(rng, 3)
    z = Zonotope(rng.standard_normal((3, 3)))
    composed = z
    for j in range(3):
        composed = minkowski_symmetrize(composed, U[:, j])
    out = orthogonal_symmetrize(z, U, g)
    assert np.allclose(out.values, composed.support(g.nodes), atol=1e-12)


def test_grid_body_validation(grids):
    g = grids[2]
    with pytest.raises(ValueError):
        GridBody(g, np.ones(3))
    with pytest.raises(ValueError):
        GridBody(g, np.full(g.size, np.inf))
    gb = sample_on(cube(2), g)
    assert sample_on(gb, g) is gb
    assert np.allclose(gb.support(2 * g.nodes[:4]), 2 * gb.values[:4])


def test_steiner_point_and_recenter(grids):
    g = grids[3]
    p = Polytope(cube_polytope(3).vertices + [0.3, -0.2, 0.1])
    assert np.allclose(steiner_point(p, g), [0.3, -0.2, 0.1], atol=1e-3)
    assert np.allclose(steiner_point(recenter(p, g), g), 0.0, atol=1e-3)


# ---------------------------------------------------------------------------
# polygons


def test_polygon_measures():
    r = rectangle(4.0, 1.0)
    assert r.area() == pytest.approx(4.0)
    assert r.perimeter() == pytest.approx(10.0)
    assert r.mean_width_half() == pytest.approx(10.0 / (2 * pi))
    assert r.inradius() == pytest.approx(0.5)
    assert r.circumradius() == pytest.approx(sqrt(4.25))
    assert np.allclose(r.centroid(), 0.0)
    assert r.normalized_area().area() == pytest.approx(pi)


def test_polygon_support_matches_points(rng):
    p = random_polygon(rng, 15)
    v = sample_uniform_sphere(rng, 2, size=40)
    assert np.allclose(p.support(v), (v @ p.vertices.T).max(axis=1))


def test_polygon_validation():
    with pytest.raises(ValueError):
        PolygonBody(np.array([[0.0, 0.0], [1.0, 0.0]]))
    with pytest.raises(ValueError):  # clockwise
        PolygonBody(np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0]]))
    with pytest.raises(ValueError):  # non-convex
        PolygonBody(np.array([[0.0, 0.0], [2.0, 0.0], [1.0, 0.2], [1.0, 2.0]]))


def test_convex_hull_2d(rng):
    pts = rng.standard_normal((200, 2))
    hull = convex_hull_2d(pts)
    p = PolygonBody(hull)
    from scipy.spatial import ConvexHull
    assert p.area() == pytest.approx(ConvexHull(pts).volume)


def _random_poly(seed):
    r = make_rng(seed)
    return random_polygon(r, int(r.integers(3, 30))), unit(r.standard_normal(2))


@settings(max_examples=80, deadline=None)
@given(seed=seeds)
def test_steiner_polygon_properties(seed):
    p, u = _random_poly(seed)
    s = steiner_symmetrize_polygon(p, u)
    # volume is preserved up to rounding
    assert s.area() == pytest.approx(p.area(), rel=1e-12)
    # symmetric about u^perp
    v = sample_uniform_sphere(make_rng(seed), 2, size=30)
    assert np.allclose(s.support(v), s.support(reflect(v, u)), atol=1e-12)
    # chord lengths along u are preserved over the shadow
    t, lo, up = chord_lengths(p, u)
    _, lo2, up2 = chord_lengths(s, u, t)
    assert np.allclose(up - lo, up2 - lo2, atol=1e-10)
    # perimeter does not increase; centred balls stay inside / outside
    assert s.perimeter() <= p.perimeter() + 1e-12
    assert s.circumradius() <= p.circumradius() + 1e-12
    assert s.inradius() >= p.inradius() - 1e-12
    # idempotent along the same direction
    s2 = steiner_symmetrize_polygon(s, u)
    assert np.allclose(s2.support(v), s.support(v), atol=1e-12)


def test_steiner_polygon_examples():
    # a square symmetrized along its axis is unchanged
    sq = rectangle(2.0, 2.0)
    s = steiner_symmetrize_polygon(sq, [0.0, 1.0])
    assert np.allclose(np.sort(s.vertices, axis=0), np.sort(sq.vertices, axis=0))
    # the right triangle along e2 becomes an isosceles triangle with the same area
    tri = PolygonBody(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]))
    s = steiner_symmetrize_polygon(tri, [0.0, 1.0])
    assert len(s.vertices) == 3
    assert s.area() == pytest.approx(0.5)
    assert sorted(map(tuple, np.round(s.vertices, 12))) == [(0.0, -0.5), (0.0, 0.5), (1.0, 0.0)]


def test_decimate_and_restore(rng):
    p = regular_polygon(400)
    d = decimate(p, 100)
    assert len(d.vertices) <= 100
    assert d.area() <= p.area()
    v = sample_uniform_sphere(rng, 2, size=50)
    assert np.all(d.support(v) <= p.support(v) + 1e-12)
    r = restore_area(d, p.area())
    assert r.area() == pytest.approx(p.area(), rel=1e-13)
    with pytest.raises(ValueError):
        decimate(p, 2)


# ---------------------------------------------------------------------------
# 3D polytopes


def test_polytope3_measures():
    c = cube3()
    assert c.volume() == pytest.approx(8.0)
    assert c.mean_width_half() == pytest.approx(1.5)
    assert c.inradius() == pytest.approx(1.0)
    assert c.circumradius() == pytest.approx(sqrt(3))
    assert c.normalized_volume().volume() == pytest.approx(4 * pi / 3)
    # interior points are dropped
    p = PolytopeBody3(np.vstack([c.vertices, [[0.1, 0.2, 0.0]]]))
    assert len(p.vertices) == 8
    with pytest.raises(ValueError):
        PolytopeBody3(np.array([[0.0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 1, 0]]))


@settings(max_examples=10, deadline=None)
@given(seed=seeds)
def test_polytope3_mean_width_two_routes(seed, grids):
    # edge-dihedral formula vs quadrature of the support function
    p = random_polytope3(make_rng(seed), 12)
    g = grids[3]
    assert p.mean_width_half() == pytest.approx(g.integrate(p.support(g.nodes)), abs=5 * g.tau)


def test_sampled_ball_close_to_ball():
    b = sampled_ball(500)
    assert b.volume() == pytest.approx(4 * pi / 3, rel=0.02)
    assert b.circumradius() == pytest.approx(1.0)


@settings(max_examples=8, deadline=None)
@given(seed=seeds)
def test_sampled_steiner_3d(seed):
    r = make_rng(seed)
    p = random_polytope3(r, 15)
    u = sample_uniform_sphere(r, 3)
    s, err = steiner_symmetrize_sampled3(p, u, 48, return_error=True)
    assert err < 0.05
    v = sample_uniform_sphere(r, 3, size=30)
    assert np.allclose(s.support(v), s.support(reflect(v, u)), atol=1e-9 * p.circumradius())
    assert s.circumradius() <= p.circumradius() + 1e-9


def test_sampled_steiner_cube_axis_exact():
    s, err = steiner_symmetrize_sampled3(cube3(), [0.0, 0.0, 1.0], 32, return_error=True)
    assert err < 1e-12
    assert s.volume() == pytest.approx(8.0)
    with pytest.raises(ValueError):
        steiner_symmetrize_sampled3(cube3(), [0.0, 0.0, 1.0], 8)
