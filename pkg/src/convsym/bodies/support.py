"""Convex bodies represented through their support functions, and the
Minkowski / orthogonal symmetrizations acting on them."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import comb

import numpy as np
from scipy.spatial import ConvexHull

from ..geometry import RngStream, SphereGrid, reflect, unit
from ..harmonics import sign_flip_maps, sign_vectors


class SupportBody:
    """Base class. Subclasses implement ``_h`` on a batch ``(m, n)``."""

    dim: int
    kind: str = "body"
    label: str | None = None

    def support(self, v) -> np.ndarray:
        """h_K(v) = sup_{x in K} <x, v> for ``v`` of shape ``(..., n)``."""
        v = np.asarray(v, dtype=float)
        if v.shape[-1] != self.dim:
            raise ValueError(f"dimension mismatch: body is {self.dim}-dimensional")
        flat = v.reshape(-1, self.dim)
        return self._h(flat).reshape(v.shape[:-1])

    __call__ = support

    def _h(self, v: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    @property
    def centrally_symmetric(self) -> bool:
        return False


@dataclass(frozen=True, eq=False)
class Ball(SupportBody):
    dim: int
    radius: float = 1.0
    label: str | None = None
    kind = "ball"

    def _h(self, v):
        return self.radius * np.linalg.norm(v, axis=1)

    @property
    def centrally_symmetric(self):
        return True

    def circumradius(self):
        return self.radius

    def inradius(self):
        return self.radius


@dataclass(frozen=True, eq=False)
class Polytope(SupportBody):
    """Convex hull of ``vertices`` (rows)."""

    vertices: np.ndarray
    label: str | None = None
    kind = "polytope"

    def __post_init__(self):
        v = np.atleast_2d(np.asarray(self.vertices, dtype=float))
        if not np.all(np.isfinite(v)):
            raise ValueError("vertices must be finite")
        object.__setattr__(self, "vertices", v)

    @property
    def dim(self):
        return self.vertices.shape[1]

    def _h(self, v, chunk=8192):
        out = np.empty(len(v))
        for lo in range(0, len(v), chunk):
            out[lo:lo + chunk] = (v[lo:lo + chunk] @ self.vertices.T).max(axis=1)
        return out

    def circumradius(self):
        return float(np.linalg.norm(self.vertices, axis=1).max())

    def inradius(self):
        """Distance from the origin to the nearest facet hyperplane (origin inside)."""
        hull = ConvexHull(self.vertices)
        offsets = -hull.equations[:, -1]
        if offsets.min() <= 0:
            raise ValueError("origin is not interior to the polytope; recenter first")
        return float(offsets.min())


@dataclass(frozen=True, eq=False)
class Zonotope(SupportBody):
    """Minkowski sum of centered segments [-g_i, g_i] (rows of ``generators``)."""

    generators: np.ndarray
    label: str | None = None
    kind = "zonotope"

    def __post_init__(self):
        g = np.atleast_2d(np.asarray(self.generators, dtype=float))
        object.__setattr__(self, "generators", g)

    @property
    def dim(self):
        return self.generators.shape[1]

    @property
    def centrally_symmetric(self):
        return True

    def _h(self, v):
        return np.abs(v @ self.generators.T).sum(axis=1)

    def inradius(self):
        """Exact inradius; zero when the generators span a proper subspace.

        Facet normals of a full-dimensional zonotope are the normals of
        (n-1)-subsets of generators, so the minimum support over them is the
        inradius.
        """
        n = self.dim
        g = self.generators
        if np.linalg.matrix_rank(g, tol=1e-12 * max(1.0, np.abs(g).max())) < n:
            return 0.0
        if comb(len(g), n - 1) > 200000:
            raise ValueError("too many generators for exact inradius")
        best = np.inf
        for sub in combinations(range(len(g)), n - 1):
            m = g[list(sub)]
            if np.linalg.matrix_rank(m) < n - 1:
                continue
            normal = np.linalg.svd(m)[2][-1]
            best = min(best, float(self._h(normal[None])[0]))
        return best


def Segment(endpoint, label=None) -> Zonotope:
    """The segment [-p, p]; a zonotope with a single generator."""
    p = np.asarray(endpoint, dtype=float)
    return Zonotope(p[None, :], label=label or "segment")


@dataclass(frozen=True, eq=False)
class GridBody(SupportBody):
    """Support function known at the nodes of a :class:`SphereGrid`.

    Off-node values come from the grid's interpolation rule, extended
    1-homogeneously.
    """

    grid: SphereGrid
    values: np.ndarray
    label: str | None = None
    kind = "grid"

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (self.grid.size,):
            raise ValueError("one value per grid node required")
        if not np.all(np.isfinite(vals)):
            raise ValueError("grid-sampled values must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def dim(self):
        return self.grid.dim

    def _h(self, v):
        r = np.linalg.norm(v, axis=1)
        out = np.zeros(len(v))
        nz = r > 0
        out[nz] = r[nz] * self.grid.interpolate(self.values, v[nz] / r[nz, None])
        return out


@dataclass(frozen=True, eq=False)
class ReflectedAverage(SupportBody):
    """(K + pi_u K) / 2 evaluated lazily: h(v) = (h_K(v) + h_K(pi_u v)) / 2."""

    base: SupportBody
    u: np.ndarray
    label: str | None = None
    kind = "minkowski-average"

    @property
    def dim(self):
        return self.base.dim

    def _h(self, v):
        return 0.5 * (self.base._h(v) + self.base._h(reflect(v, self.u)))


@dataclass(frozen=True, eq=False)
class Translated(SupportBody):
    base: SupportBody
    shift: np.ndarray
    label: str | None = None
    kind = "translated"

    @property
    def dim(self):
        return self.base.dim

    def _h(self, v):
        return self.base._h(v) + v @ self.shift


def Scaled(body: SupportBody, factor: float) -> SupportBody:
    """Dilate ``body`` about the origin by ``factor`` > 0."""
    if factor <= 0:
        raise ValueError("factor must be positive")
    if isinstance(body, Ball):
        return Ball(body.dim, body.radius * factor, body.label)
    if isinstance(body, Polytope):
        return Polytope(body.vertices * factor, body.label)
    if isinstance(body, Zonotope):
        return Zonotope(body.generators * factor, body.label)
    if isinstance(body, GridBody):
        return GridBody(body.grid, body.values * factor, body.label)
    raise TypeError(f"cannot scale {type(body).__name__}")


# ---------------------------------------------------------------------------
# symmetrizations


def minkowski_symmetrize(body: SupportBody, u) -> SupportBody:
    """Minkowski symmetrization with respect to the hyperplane u^perp.

    Balls are returned unchanged; zonotopes stay zonotopes (generators are
    halved and reflected); anything else becomes a lazy reflected average.
    """
    u = unit(u)
    if u.shape != (body.dim,):
        raise ValueError("direction dimension mismatch")
    if isinstance(body, Ball):
        return body
    if isinstance(body, Zonotope):
        g = body.generators
        return Zonotope(np.vstack([g / 2, reflect(g, u) / 2]), body.label)
    return ReflectedAverage(body, u, body.label)


def orthogonal_symmetrize(body: SupportBody, basis: np.ndarray, grid: SphereGrid,
                          rng: RngStream | None = None) -> GridBody:
    """Average of h over the 2^n sign flips of ``basis``, sampled on ``grid``.

    For n > 12 the average uses SIGN_SAMPLES random sign vectors drawn from
    ``rng``.
    """
    basis = np.asarray(basis, dtype=float)
    if basis.shape != (body.dim, body.dim) or grid.dim != body.dim:
        raise ValueError("dimension mismatch")
    maps = sign_flip_maps(basis, sign_vectors(body.dim, rng))
    acc = np.zeros(grid.size)
    m = grid.size
    batch = max(1, 2**17 // m)
    for lo in range(0, len(maps), batch):
        pts = np.einsum("mi,sij->smj", grid.nodes, maps[lo:lo + batch])
        acc += body.support(pts.reshape(-1, body.dim)).reshape(-1, m).sum(axis=0)
    return GridBody(grid, acc / len(maps), body.label)


def sample_on(body: SupportBody, grid: SphereGrid) -> GridBody:
    if isinstance(body, GridBody) and body.grid is grid:
        return body
    return GridBody(grid, body.support(grid.nodes), body.label)


def steiner_point(body: SupportBody, grid: SphereGrid) -> np.ndarray:
    """Quadrature estimate of the Steiner point n * int h(u) u dsigma(u)."""
    h = body.support(grid.nodes)
    return grid.dim * ((grid.weights * h) @ grid.nodes)


def recenter(body: SupportBody, grid: SphereGrid) -> SupportBody:
    s = steiner_point(body, grid)
    if isinstance(body, Polytope):
        return Polytope(body.vertices - s, body.label)
    return Translated(body, -s, body.label)


# ---------------------------------------------------------------------------
# seed bodies


def cube(n: int, half_side: float = 1.0) -> Zonotope:
    return Zonotope(half_side * np.eye(n), label="cube")


def box(n: int) -> Zonotope:
    """Axis-aligned box with half-sides linearly spaced from 1 to 1/2.

    Unlike the cube and the regular simplex its degree-2 energy is nonzero.
    """
    return Zonotope(np.diag(np.linspace(1.0, 0.5, n)), label="box")


def cube_polytope(n: int, half_side: float = 1.0) -> Polytope:
    corners = np.array(np.meshgrid(*[[-1.0, 1.0]] * n, indexing="ij")).reshape(n, -1).T
    return Polytope(half_side * corners, label="cube")


def regular_simplex(n: int, circumradius: float = 1.0) -> Polytope:
    """Regular simplex centered at the origin."""
    e = np.eye(n + 1) - 1.0 / (n + 1)
    q, _ = np.linalg.qr(e.T)
    v = e @ q[:, :n]
    v *= circumradius / np.linalg.norm(v[0])
    return Polytope(v, label="simplex")


def cross_polytope(n: int) -> Polytope:
    return Polytope(np.vstack([np.eye(n), -np.eye(n)]), label="cross")


def random_polytope(rng: RngStream, n: int, count: int = 12) -> Polytope:
    """Hull of Gaussian points, recentred on the vertex mean."""
    pts = rng.standard_normal((count, n))
    hull = ConvexHull(pts)
    v = pts[hull.vertices]
    return Polytope(v - v.mean(axis=0), label="random")


def seed_body(name: str, n: int) -> SupportBody:
    name = name.lower()
    if name == "ball":
        return Ball(n, 1.0, label="ball")
    if name == "cube":
        return cube(n)
    if name == "simplex":
        return regular_simplex(n)
    if name == "segment":
        return Segment(np.eye(n)[0])
    if name == "cross":
        return cross_polytope(n)
    if name == "box":
        return box(n)
    raise ValueError(f"unknown seed body {name!r}; choose one of {', '.join(SEED_BODIES)}")


SEED_BODIES = ("ball", "cube", "simplex", "segment", "cross", "box")
