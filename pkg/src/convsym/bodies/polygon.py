"""Convex polygons and exact Steiner symmetrization in the plane."""

from __future__ import annotations

from dataclasses import dataclass
from math import pi

import numpy as np

from .. import constants as C
from ..geometry import RngStream, unit
from .support import SupportBody


def _cross(o, a, b):
    return (a[..., 0] - o[..., 0]) * (b[..., 1] - o[..., 1]) - (a[..., 1] - o[..., 1]) * (b[..., 0] - o[..., 0])


def convex_hull_2d(points, tol: float = C.COLLINEAR_TOL) -> np.ndarray:
    """Counterclockwise hull by the monotone chain (lexicographic order).

    Collinear and duplicate points are dropped using the cross-product
    threshold ``tol`` scaled by the squared diameter of the point set.
    """
    pts = np.unique(np.asarray(points, dtype=float), axis=0)  # lexicographic
    if len(pts) < 3:
        raise ValueError("need at least 3 distinct points")
    scale = max(float(np.ptp(pts, axis=0).max()) ** 2, 1e-300)
    thr = tol * scale

    def chain(seq):
        out = []
        for p in seq:
            while len(out) >= 2 and _cross(out[-2], out[-1], p) <= thr:
                out.pop()
            out.append(p)
        return out

    lower = chain(pts)
    upper = chain(pts[::-1])
    hull = np.array(lower[:-1] + upper[:-1])
    if len(hull) < 3:
        raise ValueError("points are collinear")
    return hull


def _simplify(vertices: np.ndarray, tol: float = C.COLLINEAR_TOL) -> np.ndarray:
    """Drop consecutive duplicates and straight-angle vertices of a convex cycle."""
    v = np.asarray(vertices, dtype=float)
    scale = max(float(np.ptp(v, axis=0).max()), 1e-300)
    changed = True
    while changed and len(v) > 3:
        changed = False
        d = np.linalg.norm(v - np.roll(v, 1, axis=0), axis=1)
        keep = d > C.DUPLICATE_TOL * scale
        if not keep.all():
            v, changed = v[keep], True
            continue
        prev, nxt = np.roll(v, 1, axis=0), np.roll(v, -1, axis=0)
        cr = _cross(prev, v, nxt)
        # turn-angle test: the area lost per dropped vertex is at most tol*|e1||e2|/2
        lens = np.linalg.norm(v - prev, axis=1) * np.linalg.norm(nxt - v, axis=1)
        keep = cr > tol * lens
        if not keep.all() and keep.sum() >= 3:
            v, changed = v[keep], True
    return v


@dataclass(frozen=True, eq=False)
class PolygonBody(SupportBody):
    """Convex polygon with counterclockwise vertices."""

    vertices: np.ndarray
    label: str | None = None
    kind = "polygon"
    dim = 2

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2:
            raise ValueError("polygon vertices must have shape (m, 2)")
        if len(v) < 3:
            raise ValueError("polygon needs at least 3 vertices")
        if not np.all(np.isfinite(v)):
            raise ValueError("vertices must be finite")
        scale = max(float(np.ptp(v, axis=0).max()), 1e-300)
        if np.any(np.linalg.norm(v - np.roll(v, 1, axis=0), axis=1) <= C.DUPLICATE_TOL * scale):
            raise ValueError("duplicate consecutive vertices")
        cr = _cross(np.roll(v, 1, axis=0), v, np.roll(v, -1, axis=0))
        if cr.min() < -C.CONVEX_TOL * scale**2:
            raise ValueError("vertices are not in convex counterclockwise order")
        # a star-shaped but multiply-wound cycle passes the local test
        turn = np.arctan2(cr, np.einsum("ij,ij->i", v - np.roll(v, 1, axis=0),
                                        np.roll(v, -1, axis=0) - v)).sum()
        if abs(turn - 2 * pi) > 1e-6:
            raise ValueError("vertex cycle does not wind once")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    @classmethod
    def from_points(cls, points, label=None) -> "PolygonBody":
        return cls(convex_hull_2d(points), label)

    def _h(self, v, chunk=8192):
        out = np.empty(len(v))
        for lo in range(0, len(v), chunk):
            out[lo:lo + chunk] = (v[lo:lo + chunk] @ self.vertices.T).max(axis=1)
        return out

    @property
    def edges(self) -> np.ndarray:
        return np.roll(self.vertices, -1, axis=0) - self.vertices

    def area(self) -> float:
        x, y = self.vertices.T
        return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))

    def perimeter(self) -> float:
        return float(np.linalg.norm(self.edges, axis=1).sum())

    def mean_width_half(self) -> float:
        """Exact M*: the perimeter over 2 pi (Cauchy)."""
        return self.perimeter() / (2 * pi)

    def circumradius(self) -> float:
        return float(np.linalg.norm(self.vertices, axis=1).max())

    def inradius(self) -> float:
        """Distance from the origin to the nearest edge line (origin inside)."""
        e = self.edges
        # outward normal of a ccw edge is (e_y, -e_x)
        normals = np.column_stack([e[:, 1], -e[:, 0]]) / np.linalg.norm(e, axis=1)[:, None]
        d = np.einsum("ij,ij->i", normals, self.vertices)
        return float(d.min())

    def centroid(self) -> np.ndarray:
        v, w = self.vertices, np.roll(self.vertices, -1, axis=0)
        cr = _cross(np.zeros(2), v, w)
        return ((v + w) * cr[:, None]).sum(axis=0) / (3.0 * cr.sum())

    def translated(self, shift) -> "PolygonBody":
        return PolygonBody(self.vertices + np.asarray(shift, dtype=float), self.label)

    def scaled(self, factor: float) -> "PolygonBody":
        if factor <= 0:
            raise ValueError("factor must be positive")
        return PolygonBody(self.vertices * factor, self.label)

    def normalized_area(self, target: float = pi) -> "PolygonBody":
        return self.scaled(np.sqrt(target / self.area()))


def _frame(direction):
    u = unit(direction)
    if u.shape != (2,):
        raise ValueError("direction must be a 2-vector")
    return np.array([[u[1], -u[0]], u])  # rotation with u -> e2


def _chains(p: np.ndarray):
    """Lower chain (x increasing) and upper chain (x increasing) of a ccw polygon."""
    x, y = p[:, 0], p[:, 1]
    m = len(p)
    left = np.flatnonzero(x == x.min())
    right = np.flatnonzero(x == x.max())
    i0 = left[np.argmin(y[left])]
    i1 = right[np.argmin(y[right])]
    j0 = right[np.argmax(y[right])]
    j1 = left[np.argmax(y[left])]

    def walk(a, b):
        idx = [a]
        while idx[-1] != b:
            idx.append((idx[-1] + 1) % m)
        return np.array(idx)

    lower = walk(i0, i1)
    upper = walk(j0, j1)[::-1]
    return p[lower], p[upper]


def chord_lengths(poly: PolygonBody, direction, t: np.ndarray | None = None):
    """Chord lengths of ``poly`` along ``direction`` over the projection axis.

    Returns ``(t, lower, upper)`` in the rotated frame where ``direction``
    is e2; by default ``t`` are the projections of all vertices.
    """
    rot = _frame(direction)
    p = poly.vertices @ rot.T
    lo, up = _chains(p)
    if t is None:
        t = np.unique(p[:, 0])
    lower = np.interp(t, lo[:, 0], lo[:, 1])
    upper = np.interp(t, up[:, 0], up[:, 1])
    return t, lower, upper


def steiner_symmetrize_polygon(poly: PolygonBody, direction) -> PolygonBody:
    """Exact Steiner symmetrization about the line through 0 orthogonal to ``direction``.

    Chord length is piecewise linear between vertex projections, so the
    symmetral is the polygon through (t, +-l(t)/2) at those breakpoints.
    """
    if poly.area() < 1e-12:
        raise ValueError("degenerate polygon")
    rot = _frame(direction)
    t, lower, upper = chord_lengths(poly, direction)
    half = np.maximum(upper - lower, 0.0) / 2
    bottom = np.column_stack([t, -half])
    top = np.column_stack([t, half])[::-1]
    if half[-1] == 0.0:
        top = top[1:]
    if half[0] == 0.0:
        top = top[:-1]
    cycle = np.vstack([bottom, top])
    cycle = _simplify(cycle)
    return PolygonBody(cycle @ rot, poly.label)


# ---------------------------------------------------------------------------
# vertex-count control


def decimate(poly: PolygonBody, max_vertices: int) -> PolygonBody:
    """Remove vertices cutting off the smallest triangles until at most
    ``max_vertices`` remain. The result is the hull of a vertex subset, so it
    is convex and contained in ``poly``."""
    if max_vertices < 3:
        raise ValueError("max_vertices must be >= 3")
    v = poly.vertices
    while len(v) > max_vertices:
        excess = len(v) - max_vertices
        area = np.abs(_cross(np.roll(v, 1, axis=0), v, np.roll(v, -1, axis=0)))
        order = np.argsort(area, kind="stable")
        drop = np.zeros(len(v), dtype=bool)
        blocked = np.zeros(len(v), dtype=bool)
        count = 0
        for i in order:
            if count >= excess:
                break
            if blocked[i]:
                continue
            drop[i] = True
            blocked[i] = blocked[(i - 1) % len(v)] = blocked[(i + 1) % len(v)] = True
            count += 1
        v = v[~drop]
    return PolygonBody(v, poly.label)


def restore_area(poly: PolygonBody, area: float) -> PolygonBody:
    """Dilate about the origin to the given area."""
    return poly.scaled(np.sqrt(area / poly.area()))


# ---------------------------------------------------------------------------
# seeds


def rectangle(width: float, height: float) -> PolygonBody:
    a, b = width / 2, height / 2
    return PolygonBody(np.array([[-a, -b], [a, -b], [a, b], [-a, b]]), label="rectangle")


def regular_polygon(m: int, radius: float = 1.0, phase: float = 0.0) -> PolygonBody:
    th = phase + 2 * pi * np.arange(m) / m
    return PolygonBody(radius * np.column_stack([np.cos(th), np.sin(th)]), label=f"{m}-gon")


def random_polygon(rng: RngStream, count: int = 12, anisotropy: float | None = None) -> PolygonBody:
    """Hull of ``count`` uniform points in a random ellipse, centred at its centroid.

    The ellipse aspect ratio is drawn from [1, 4] unless ``anisotropy`` is given.
    """
    r = np.sqrt(rng.uniform(size=count))
    th = rng.uniform(0, 2 * pi, size=count)
    pts = np.column_stack([r * np.cos(th), r * np.sin(th)])
    a = rng.uniform(1, 4) if anisotropy is None else anisotropy
    c, s = np.cos(rot := rng.uniform(0, pi)), np.sin(rot)
    pts = pts * [a, 1.0] @ np.array([[c, s], [-s, c]])
    poly = PolygonBody.from_points(pts, label="random")
    return poly.translated(-poly.centroid())
