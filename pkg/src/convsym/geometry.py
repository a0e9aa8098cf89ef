"""Euclidean primitives: reflections, Haar-random bases, sphere sampling and
quadrature grids on S^{n-1}.

Vectors are plain ``numpy`` arrays. A point is shape ``(n,)``; batches are
``(..., n)``. An orthonormal basis is an ``(n, n)`` array whose *columns* are
the basis vectors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from math import gamma, pi, sqrt
from typing import Callable, Union

import numpy as np
from scipy.spatial import ConvexHull, cKDTree

from . import constants as C

RngStream = np.random.Generator
SphereFunction = Callable[[np.ndarray], np.ndarray]


def make_rng(seed: int = C.DEFAULT_SEED) -> RngStream:
    """PCG64 stream; identical seeds give bit-identical sequences."""
    return np.random.Generator(np.random.PCG64(int(seed) & 0xFFFFFFFFFFFFFFFF))


def derive_seed(base: int, index: int) -> int:
    return (int(base) ^ int(index)) & 0xFFFFFFFFFFFFFFFF


def _check_dim(*arrays):
    dims = {np.shape(a)[-1] for a in arrays}
    if len(dims) != 1:
        raise ValueError(f"dimension mismatch: {sorted(dims)}")
    return dims.pop()


def unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    norm = np.linalg.norm(v, axis=-1, keepdims=True)
    if np.any(norm == 0):
        raise ValueError("cannot normalize the zero vector")
    return v / norm


def reflect(x, u) -> np.ndarray:
    """Reflect ``x`` through the hyperplane orthogonal to the unit vector ``u``.

    ``x`` may be a batch ``(..., n)``.
    """
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    _check_dim(x, u)
    if abs(np.linalg.norm(u) - 1.0) > 1e-9:
        raise ValueError("u must be a unit vector")
    return x - 2.0 * (x @ u)[..., None] * u


def sample_haar_basis(rng: RngStream, n: int) -> np.ndarray:
    """Haar-distributed orthogonal matrix via QR of a Gaussian matrix.

    The diagonal of ``R`` is forced positive, which makes the distribution of
    ``Q`` exactly Haar on O(n). Columns are the basis vectors.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    z = rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    d = np.sign(np.diag(r))
    d[d == 0] = 1.0
    return q * d


def sample_uniform_sphere(rng: RngStream, n: int, size: int | None = None) -> np.ndarray:
    """Uniform point(s) on S^{n-1} from normalized Gaussians."""
    if n < 2:
        raise ValueError("n must be >= 2")
    shape = (n,) if size is None else (size, n)
    while True:
        z = rng.standard_normal(shape)
        norms = np.linalg.norm(z, axis=-1, keepdims=True)
        if np.all(norms > 1e-300):
            return z / norms


def is_orthonormal(basis, tol: float = C.ORTHO_TOL) -> bool:
    b = np.asarray(basis, dtype=float)
    return bool(np.max(np.abs(b.T @ b - np.eye(b.shape[1]))) <= tol)


def abs_moment(n: int) -> float:
    """Exact value of the integral of |x_1| over S^{n-1} against sigma."""
    return gamma(n / 2) / (sqrt(pi) * gamma((n + 1) / 2))


# ---------------------------------------------------------------------------
# quadrature grids


@dataclass(frozen=True, eq=False)
class SphereGrid:
    """Quadrature nodes and probability weights on S^{n-1}.

    ``tau`` is the grid tolerance measured at construction: twice the worst
    error over the constant, first and second moment checks and a set of
    kinked test integrands ``|<x, u>|`` (support functions of segments).
    """

    nodes: np.ndarray
    weights: np.ndarray
    scheme: str
    resolution: int
    tau: float = 0.0
    seed: int | None = None
    shape: tuple = field(default=())

    @property
    def dim(self) -> int:
        return self.nodes.shape[1]

    @property
    def size(self) -> int:
        return self.nodes.shape[0]

    def integrate(self, f: Union[SphereFunction, np.ndarray]) -> float:
        return integrate(self, f)

    @cached_property
    def mesh_size(self) -> float:
        """Largest nearest-neighbour angular gap between nodes."""
        tree = cKDTree(self.nodes)
        d, _ = tree.query(self.nodes, k=2)
        return float(2 * np.arcsin(np.clip(d[:, 1].max() / 2, 0, 1)))

    @cached_property
    def _monomial_cache(self) -> dict:
        return {}

    def monomial_matrix(self, exps: np.ndarray) -> np.ndarray:
        """Node values of the monomials x^a for the exponent rows ``exps``."""
        key = exps.tobytes() + bytes([exps.shape[1]])
        cache = self._monomial_cache
        if key not in cache:
            top = int(exps.max(initial=0))
            powers = [np.ones_like(self.nodes)]
            for _ in range(top):
                powers.append(powers[-1] * self.nodes)
            mono = np.ones((self.size, len(exps)))
            for i in range(self.dim):
                mono *= np.stack([powers[e][:, i] for e in exps[:, i]], axis=1)
            cache[key] = mono
        return cache[key]

    @cached_property
    def _interpolator(self):
        if self.scheme == "angular":
            return _AngularInterpolator(self.size)
        if self.scheme == "gauss-product":
            return _PolarInterpolator(self.nodes, self.shape)
        if self.scheme == "hopf-product":
            return _HopfInterpolator(self.nodes, self.shape)
        if self.dim <= 5:
            return _HullInterpolator(self.nodes)
        return _NearestInterpolator(self.nodes)

    def interpolate(self, values: np.ndarray, points: np.ndarray) -> np.ndarray:
        """Evaluate node ``values`` at arbitrary unit ``points`` ``(..., n)``.

        n=2: piecewise linear in angle. n=3: bicubic Lagrange in (polar
        angle, azimuth). n=4: tricubic Lagrange in Hopf angles. Both product
        rules continue the grid across the poles by reflection.
        n=5 Monte Carlo: linear on the simplices of the convex hull of the
        nodes. n>=6: nearest node.
        """
        points = np.asarray(points, dtype=float)
        _check_dim(points, self.nodes)
        flat = points.reshape(-1, self.dim)
        out = self._interpolator(np.asarray(values, dtype=float), flat)
        return out.reshape(points.shape[:-1])


class _AngularInterpolator:
    def __init__(self, m: int):
        self.m = m

    def __call__(self, values, pts):
        theta = np.arctan2(pts[:, 1], pts[:, 0]) % (2 * pi)
        s = theta * (self.m / (2 * pi))
        j = np.floor(s).astype(np.int64)
        frac = s - j
        j %= self.m
        return (1.0 - frac) * values[j] + frac * values[(j + 1) % self.m]


def _radial_stencil(coord, knots):
    """Four-point Lagrange stencil on sorted nonuniform ``knots``.

    Returns the first stencil index ``i`` (points ``i..i+3``) and weights of
    shape ``(m, 4)``.
    """
    i = np.clip(np.searchsorted(knots, coord, side="right") - 2, 0, len(knots) - 4)
    pts = knots[i[:, None] + np.arange(4)]
    w = np.ones((len(coord), 4))
    for j in range(4):
        for l in range(4):
            if l != j:
                w[:, j] *= (coord - pts[:, l]) / (pts[:, j] - pts[:, l])
    return i, w


def _periodic_stencil(angle, count):
    """Four-point cubic Lagrange stencil for nodes at 2 pi (j + 1/2) / count."""
    s = (angle % (2 * pi)) * (count / (2 * pi)) - 0.5
    j = np.floor(s).astype(np.int64)
    f = s - j
    w = np.column_stack([
        -f * (f - 1) * (f - 2) / 6,
        (f + 1) * (f - 1) * (f - 2) / 2,
        -(f + 1) * f * (f - 2) / 2,
        (f + 1) * f * (f - 1) / 6,
    ])
    idx = (j[:, None] + np.arange(-1, 3)) % count
    return idx, w


def _reflected_knots(inner, top):
    # two ghost knots past each end of [0, top], mirrored through the poles
    return np.concatenate([-inner[1::-1], inner, 2 * top - inner[:-3:-1]])


class _PolarInterpolator:
    """Bicubic Lagrange in (psi, phi) with psi = arccos(-z).

    Ghost rings past the poles use (-psi, phi) ~ (psi, phi + pi), so the
    stencil never needs a value at a pole.
    """

    def __init__(self, nodes, shape):
        self.nr, self.na = shape
        z = nodes.reshape(self.nr, self.na, 3)[:, 0, 2]
        self.knots = _reflected_knots(np.arccos(-z), pi)

    def table(self, values):
        v = values.reshape(self.nr, self.na)
        half = self.na // 2
        lo = np.roll(v[1::-1], -half, axis=1)
        hi = np.roll(v[:-3:-1], -half, axis=1)
        return np.vstack([lo, v, hi])

    def __call__(self, values, pts, chunk: int = 65536):
        table = self.table(values).ravel()
        out = np.empty(len(pts))
        for c in range(0, len(pts), chunk):
            p = pts[c:c + chunk]
            psi = np.arccos(np.clip(-p[:, 2], -1.0, 1.0))
            i, wi = _radial_stencil(psi, self.knots)
            ja, wa = _periodic_stencil(np.arctan2(p[:, 1], p[:, 0]), self.na)
            rows = (i[:, None] + np.arange(4))[:, :, None] * self.na + ja[:, None, :]
            out[c:c + chunk] = np.einsum("pi,pj,pij->p", wi, wa, table[rows])
        return out


class _HopfInterpolator:
    """Tricubic Lagrange in Hopf angles (eta, a, b).

    x = (cos(eta) e^{ia}, sin(eta) e^{ib}). Ghost layers use
    (-eta, a, b) ~ (eta, a, b + pi) and (pi - eta, a, b) ~ (eta, a + pi, b).
    """

    def __init__(self, nodes, shape):
        self.nt, self.na, _ = shape
        x = nodes.reshape(self.nt, self.na, self.na, 4)[:, 0, 0]
        eta = np.arctan2(np.hypot(x[:, 2], x[:, 3]), np.hypot(x[:, 0], x[:, 1]))
        self.knots = _reflected_knots(eta, pi / 2)

    def table(self, values):
        v = values.reshape(self.nt, self.na, self.na)
        half = self.na // 2
        lo = np.roll(v[1::-1], -half, axis=2)
        hi = np.roll(v[:-3:-1], -half, axis=1)
        return np.concatenate([lo, v, hi])

    def __call__(self, values, pts, chunk: int = 16384):
        table = self.table(values).ravel()
        na = self.na
        out = np.empty(len(pts))
        for c in range(0, len(pts), chunk):
            p = pts[c:c + chunk]
            eta = np.arctan2(np.hypot(p[:, 2], p[:, 3]), np.hypot(p[:, 0], p[:, 1]))
            i, wi = _radial_stencil(eta, self.knots)
            ja, wa = _periodic_stencil(np.arctan2(p[:, 1], p[:, 0]), na)
            jb, wb = _periodic_stencil(np.arctan2(p[:, 3], p[:, 2]), na)
            rows = (i[:, None] + np.arange(4))[:, :, None, None] * na + ja[:, None, :, None]
            idx = rows * na + jb[:, None, None, :]
            out[c:c + chunk] = np.einsum("pi,pj,pk,pijk->p", wi, wa, wb, table[idx])
        return out


class _HullInterpolator:
    def __init__(self, nodes: np.ndarray, candidates: int = 8):
        hull = ConvexHull(nodes, qhull_options="QJ")
        verts = nodes[hull.simplices]  # (F, n, n): rows are vertices
        # flat simplices from cospherical ties subtend no solid angle
        keep = np.abs(np.linalg.det(verts)) > 1e-12
        self.simplices = hull.simplices[keep]
        verts = verts[keep]
        self.inv = np.linalg.inv(np.transpose(verts, (0, 2, 1)))
        cent = verts.mean(axis=1)
        self.tree = cKDTree(cent / np.linalg.norm(cent, axis=1, keepdims=True))
        self.k = min(candidates, len(self.simplices))

    def __call__(self, values, pts, chunk: int = 65536):
        out = np.empty(len(pts))
        for lo in range(0, len(pts), chunk):
            y = pts[lo:lo + chunk]
            _, cand = self.tree.query(y, k=self.k)
            lam = np.einsum("qkij,qj->qki", self.inv[cand], y)
            best = np.argmax(lam.min(axis=2), axis=1)
            rows = np.arange(len(y))
            lam = lam[rows, best]
            lam = np.clip(lam, 0.0, None)
            beta = lam / lam.sum(axis=1, keepdims=True)
            idx = self.simplices[cand[rows, best]]
            out[lo:lo + chunk] = np.einsum("qi,qi->q", beta, values[idx])
        return out


class _NearestInterpolator:
    def __init__(self, nodes):
        self.tree = cKDTree(nodes)

    def __call__(self, values, pts):
        _, idx = self.tree.query(pts)
        return values[idx]


def _angular_grid(m: int):
    theta = 2 * pi * np.arange(m) / m
    nodes = np.column_stack([np.cos(theta), np.sin(theta)])
    return nodes, np.full(m, 1.0 / m), (m,)


def _polar_grid(res: int):
    z, wz = np.polynomial.legendre.leggauss(res)
    na = 2 * res
    phi = 2 * pi * (np.arange(na) + 0.5) / na
    zz, pp = np.meshgrid(z, phi, indexing="ij")
    rho = np.sqrt(1 - zz**2)
    nodes = np.stack([rho * np.cos(pp), rho * np.sin(pp), zz], axis=-1).reshape(-1, 3)
    w = np.repeat(wz / 2.0, na) / na
    return nodes, w, (res, na)


def _hopf_grid(res: int):
    # x = (sqrt(1-t) e^{i a}, sqrt(t) e^{i b}); sigma is uniform in (t, a, b).
    nt = max(res // 2, 2)
    na = res if res % 2 == 0 else res + 1
    t, wt = np.polynomial.legendre.leggauss(nt)
    t = (t + 1) / 2
    wt = wt / 2
    a = 2 * pi * (np.arange(na) + 0.5) / na
    tt, aa, bb = np.meshgrid(t, a, a, indexing="ij")
    r1, r2 = np.sqrt(1 - tt), np.sqrt(tt)
    nodes = np.stack(
        [r1 * np.cos(aa), r1 * np.sin(aa), r2 * np.cos(bb), r2 * np.sin(bb)], axis=-1
    ).reshape(-1, 4)
    w = np.repeat(wt, na * na) / (na * na)
    return nodes, w, (nt, na, na)


def _monte_carlo_grid(n: int, m: int, rng: RngStream):
    half = sample_uniform_sphere(rng, n, size=(m + 1) // 2)
    nodes = np.concatenate([half, -half])[:m] if m % 2 == 0 else np.concatenate([half, -half[:-1]])
    return nodes, np.full(len(nodes), 1.0 / len(nodes)), (len(nodes),)


def _self_check(nodes: np.ndarray, w: np.ndarray) -> float:
    n = nodes.shape[1]
    err = abs(w.sum() - 1.0)
    first = w @ nodes
    err = max(err, np.max(np.abs(first)))
    second = (nodes * w[:, None]).T @ nodes
    err = max(err, np.max(np.abs(second - np.eye(n) / n)))
    dirs = [np.eye(n)[0], np.eye(n)[-1], unit(np.r_[1.0, 1.0, np.zeros(n - 2)]),
            unit(np.arange(1.0, n + 1))]
    exact = abs_moment(n)
    for u in dirs:
        err = max(err, abs(w @ np.abs(nodes @ u) - exact))
    return float(err)


def build_grid(n: int, resolution: int | None = None, rng: RngStream | None = None,
               seed: int | None = None) -> SphereGrid:
    """Build a quadrature grid on S^{n-1}.

    ``resolution`` means: n=2 number of angles; n=3 number of Gauss-Legendre
    rings in z (azimuth uses twice as many); n=4 number of angles per Hopf
    circle (Gauss-Legendre in t=sin^2 uses half as many); n>=5 number of
    Monte Carlo nodes (antithetic pairs).
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    if resolution is None:
        resolution = C.DEFAULT_RESOLUTION.get(n, C.DEFAULT_MC_NODES)
    if resolution < C.MIN_GRID_RESOLUTION:
        raise ValueError(f"resolution must be >= {C.MIN_GRID_RESOLUTION}")
    if n == 2:
        nodes, w, shape = _angular_grid(resolution)
        scheme = "angular"
    elif n == 3:
        nodes, w, shape = _polar_grid(resolution)
        scheme = "gauss-product"
    elif n == 4:
        nodes, w, shape = _hopf_grid(resolution)
        scheme = "hopf-product"
    else:
        if rng is None:
            seed = C.DEFAULT_SEED if seed is None else seed
            rng = make_rng(seed)
        nodes, w, shape = _monte_carlo_grid(n, resolution, rng)
        scheme = "monte-carlo"
    tau = max(2.0 * _self_check(nodes, w), 1e-14)
    nodes.setflags(write=False)
    w.setflags(write=False)
    return SphereGrid(nodes, w, scheme, resolution, tau, seed, shape)


def integrate(grid: SphereGrid, f: Union[SphereFunction, np.ndarray]) -> float:
    """Quadrature sum of ``f`` against sigma; ``f`` is a callable or node values."""
    vals = f(grid.nodes) if callable(f) else np.asarray(f, dtype=float)
    vals = np.asarray(vals, dtype=float)
    if vals.shape != grid.weights.shape:
        raise ValueError("f must provide one value per node")
    if not np.all(np.isfinite(vals)):
        raise ValueError("non-finite function value at a grid node")
    return float(grid.weights @ vals)
