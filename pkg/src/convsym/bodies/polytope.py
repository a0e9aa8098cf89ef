"""Three-dimensional polytopes and an approximate sampled Steiner symmetrization."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from math import pi

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from ..geometry import RngStream, sample_uniform_sphere, unit
from .polygon import convex_hull_2d
from .support import SupportBody


@dataclass(frozen=True, eq=False)
class PolytopeBody3(SupportBody):
    """Convex polytope in R^3 stored by its extreme vertices.

    Facets are the (triangulated) hull facets with outward normals; the
    constructor keeps only extreme points.
    """

    vertices: np.ndarray
    label: str | None = None
    kind = "polytope3"
    dim = 3

    def __post_init__(self):
        pts = np.asarray(self.vertices, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 3:
            raise ValueError("vertices must have shape (m, 3)")
        if not np.all(np.isfinite(pts)):
            raise ValueError("vertices must be finite")
        try:
            hull = ConvexHull(pts)
        except QhullError as exc:
            raise ValueError("degenerate polytope: points do not span R^3") from exc
        if hull.volume < 1e-12:
            raise ValueError("degenerate polytope")
        v = pts[np.sort(hull.vertices)]
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    @cached_property
    def hull(self) -> ConvexHull:
        return ConvexHull(self.vertices)

    @property
    def facets(self) -> np.ndarray:
        """Vertex index triples, oriented counterclockwise seen from outside."""
        h = self.hull
        tri = h.simplices.copy()
        a, b, c = (self.vertices[tri[:, i]] for i in range(3))
        flip = np.einsum("ij,ij->i", np.cross(b - a, c - a), h.equations[:, :3]) < 0
        tri[flip] = tri[flip][:, ::-1]
        return tri

    @property
    def normals(self) -> np.ndarray:
        return self.hull.equations[:, :3]

    def _h(self, v, chunk=8192):
        out = np.empty(len(v))
        for lo in range(0, len(v), chunk):
            out[lo:lo + chunk] = (v[lo:lo + chunk] @ self.vertices.T).max(axis=1)
        return out

    def volume(self) -> float:
        """Tetrahedral fan from the vertex mean over the oriented facets."""
        c = self.vertices.mean(axis=0)
        tri = self.vertices[self.facets] - c
        return float(np.einsum("ij,ij->i", tri[:, 0], np.cross(tri[:, 1], tri[:, 2])).sum() / 6.0)

    def mean_width_half(self) -> float:
        """Exact M* from edge lengths and exterior dihedral angles:
        M* = (1/8pi) sum_e length_e * (pi - interior angle_e)."""
        h = self.hull
        eq = h.equations[:, :3]
        total = 0.0
        for f, nbrs in enumerate(h.neighbors):
            for j, g in enumerate(nbrs):
                if g < f:
                    continue
                edge = np.delete(h.simplices[f], j)
                length = np.linalg.norm(self.vertices[edge[0]] - self.vertices[edge[1]])
                ext = np.arccos(np.clip(eq[f] @ eq[g], -1.0, 1.0))
                total += length * ext
        return total / (8 * pi)

    def circumradius(self) -> float:
        return float(np.linalg.norm(self.vertices, axis=1).max())

    def inradius(self) -> float:
        off = -self.hull.equations[:, -1]
        if off.min() <= 0:
            raise ValueError("origin is not interior to the polytope; recenter first")
        return float(off.min())

    def centroid(self) -> np.ndarray:
        c = self.vertices.mean(axis=0)
        tri = self.vertices[self.facets] - c
        vol = np.einsum("ij,ij->i", tri[:, 0], np.cross(tri[:, 1], tri[:, 2])) / 6.0
        return c + (vol[:, None] * tri.sum(axis=1) / 4.0).sum(axis=0) / vol.sum()

    def translated(self, shift) -> "PolytopeBody3":
        return PolytopeBody3(self.vertices + np.asarray(shift, dtype=float), self.label)

    def scaled(self, factor: float) -> "PolytopeBody3":
        if factor <= 0:
            raise ValueError("factor must be positive")
        return PolytopeBody3(self.vertices * factor, self.label)

    def normalized_volume(self, target: float = 4 * pi / 3) -> "PolytopeBody3":
        return self.scaled(np.cbrt(target / self.volume()))


def _plane_frame(direction):
    u = unit(direction)
    if u.shape != (3,):
        raise ValueError("direction must be a 3-vector")
    q, _ = np.linalg.qr(np.column_stack([u, np.eye(3)]))
    a, b = q[:, 1], q[:, 2]
    return a, b, u


def _point_in_polygon(pts, hull2):
    nxt = np.roll(hull2, -1, axis=0)
    e = nxt - hull2
    cr = e[None, :, 0] * (pts[:, None, 1] - hull2[None, :, 1]) - e[None, :, 1] * (pts[:, None, 0] - hull2[None, :, 0])
    return (cr >= -1e-12).all(axis=1)


def chord_intervals(body: PolytopeBody3, base_points: np.ndarray, u: np.ndarray):
    """For lines p + s u (p in ``base_points``) return (s_min, s_max) of
    the intersection with ``body``; empty lines get s_min > s_max."""
    eq = body.hull.equations
    nu = eq[:, :3] @ u
    rhs = -(base_points @ eq[:, :3].T + eq[:, 3])  # n.p + s n.u + d <= 0  ->  s n.u <= rhs
    with np.errstate(divide="ignore", invalid="ignore"):
        bound = rhs / nu
    upper = np.where(nu > 1e-15, bound, np.inf).min(axis=1)
    lower = np.where(nu < -1e-15, bound, -np.inf).max(axis=1)
    parallel_bad = ((np.abs(nu) <= 1e-15) & (rhs < -1e-12)).any(axis=1)
    lower[parallel_bad] = np.inf
    return lower, upper


def steiner_symmetrize_sampled3(body: PolytopeBody3, direction, planar_resolution: int = 64,
                                return_error: bool = False):
    """Approximate Steiner symmetrization about the plane through 0 orthogonal to ``direction``.

    Chords are computed exactly along the lines through a square lattice on
    the shadow (plus the projected vertices); the output is the hull of the
    recentred chord endpoints. With ``return_error`` the relative volume
    change is returned as well.
    """
    if planar_resolution < 16:
        raise ValueError("planar_resolution must be >= 16")
    a, b, u = _plane_frame(direction)
    proj = body.vertices @ np.column_stack([a, b])
    shadow = convex_hull_2d(proj)
    lo, hi = proj.min(axis=0), proj.max(axis=0)
    gx = np.linspace(lo[0], hi[0], planar_resolution)
    gy = np.linspace(lo[1], hi[1], planar_resolution)
    lattice = np.stack(np.meshgrid(gx, gy, indexing="ij"), axis=-1).reshape(-1, 2)
    lattice = lattice[_point_in_polygon(lattice, shadow)]
    plane = np.vstack([shadow, lattice])
    base = plane[:, :1] * a + plane[:, 1:] * b
    s0, s1 = chord_intervals(body, base, u)
    ok = s1 >= s0 - 1e-12
    if ok.sum() < 4:
        raise ValueError("empty chord set; shadow grid too coarse")
    half = np.maximum(s1[ok] - s0[ok], 0.0)[:, None] / 2
    pts = np.vstack([base[ok] + half * u, base[ok] - half * u])
    out = PolytopeBody3(pts, body.label)
    if return_error:
        v0 = body.volume()
        return out, abs(out.volume() - v0) / v0
    return out


def sampled_ball(count: int = 500, rng: RngStream | None = None, radius: float = 1.0) -> PolytopeBody3:
    """Polytope with ``count`` vertices on the sphere (Fibonacci lattice unless ``rng``)."""
    if rng is not None:
        pts = sample_uniform_sphere(rng, 3, count)
    else:
        i = np.arange(count) + 0.5
        z = 1 - 2 * i / count
        phi = pi * (1 + 5**0.5) * i
        r = np.sqrt(1 - z**2)
        pts = np.column_stack([r * np.cos(phi), r * np.sin(phi), z])
    return PolytopeBody3(radius * pts, label="ball")


def cube3(half_side: float = 1.0) -> PolytopeBody3:
    c = np.array(np.meshgrid(*[[-1.0, 1.0]] * 3, indexing="ij")).reshape(3, -1).T
    return PolytopeBody3(half_side * c, label="cube")


def random_polytope3(rng: RngStream, count: int = 20) -> PolytopeBody3:
    """Hull of Gaussian points with random axis scales, centred at its centroid."""
    pts = rng.standard_normal((count, 3)) * rng.uniform(0.5, 2.0, size=3)
    p = PolytopeBody3(pts, label="random")
    return p.translated(-p.centroid())
