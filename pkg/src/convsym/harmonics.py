"""Spherical harmonics on S^{n-1}: Gegenbauer polynomials, dimension counts,
zonal harmonics, degree projections and Monte Carlo checks of the
harmonic identities that govern orthogonal symmetrization.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations_with_replacement, product
from math import comb, exp, factorial, log, sqrt
from typing import Callable

import numpy as np
from scipy.linalg import null_space

from . import constants as C
from .geometry import RngStream, SphereGrid, sample_haar_basis, sample_uniform_sphere, unit

log_ = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Gegenbauer polynomials


def _check_nk(n, k):
    if n < 2:
        raise ValueError("n must be >= 2")
    if k < 0:
        raise ValueError("degree k must be >= 0")


def gegenbauer_all(n: int, kmax: int, t) -> np.ndarray:
    """Normalized Gegenbauer values G_0..G_kmax at ``t``; shape ``(kmax+1, *t.shape)``.

    G_k(1) = 1. For n=2 these are Chebyshev polynomials T_k.
    """
    _check_nk(n, kmax)
    t = np.asarray(t, dtype=float)
    out = np.empty((kmax + 1,) + t.shape)
    out[0] = 1.0
    if kmax >= 1:
        out[1] = t
    lam2 = n - 2.0  # 2*lambda
    for k in range(1, kmax):
        if n == 2:
            out[k + 1] = 2.0 * t * out[k] - out[k - 1]
        else:
            out[k + 1] = ((2 * k + lam2) * t * out[k] - k * out[k - 1]) / (k + lam2)
    return out


def gegenbauer(n: int, k: int, t):
    """G_k(t) for dimension n, normalized so that G_k(1) = 1."""
    _check_nk(n, k)
    ta = np.asarray(t, dtype=float)
    if np.any(np.abs(ta) > 1 + 1e-12):
        raise ValueError("t must lie in [-1, 1]")
    val = gegenbauer_all(n, k, ta)[k]
    return float(val) if val.ndim == 0 else val


@lru_cache(maxsize=None)
def gegenbauer_coefficients(n: int, k: int) -> tuple:
    """Monomial coefficients c_j of G_k(t) = sum_j c_j t^j (exact rationals as floats)."""
    from fractions import Fraction

    prev, cur = [Fraction(1)], [Fraction(0), Fraction(1)]
    if k == 0:
        return (1.0,)
    for j in range(1, k):
        nxt = [Fraction(0)] * (j + 2)
        if n == 2:
            a, b, d = Fraction(2), Fraction(1), Fraction(1)
        else:
            a, b, d = Fraction(2 * j + n - 2), Fraction(j), Fraction(j + n - 2)
        for i, c in enumerate(cur):
            nxt[i + 1] += a * c / d
        for i, c in enumerate(prev):
            nxt[i] -= b * c / d
        prev, cur = cur, nxt
    return tuple(float(c) for c in cur)


# ---------------------------------------------------------------------------
# dimensions


def dim_harmonic(n: int, k: int) -> int:
    """dim S_k: number of independent spherical harmonics of degree k in R^n."""
    _check_nk(n, k)
    if k == 0:
        return 1
    # (2k+n-2)(n+k-3)! / (k!(n-2)!) == C(n+k-1, n-1) - C(n+k-3, n-1)
    return comb(n + k - 1, n - 1) - comb(n + k - 3, n - 1)


def dim_invariant(n: int, k: int) -> int:
    """Dimension of the harmonics of degree k fixed by all coordinate sign flips."""
    _check_nk(n, k)
    if k % 2:
        return 0
    return comb(n + k // 2 - 2, n - 2)


def exact_ratio(n: int, k: int) -> float:
    """Expected energy retained by a random orthogonal symmetrization of S_k."""
    return dim_invariant(n, k) / dim_harmonic(n, k)


def ratio_upper_bound(n: int, k: int) -> float:
    return (k / (n - 2 + k)) ** (k / 2)


def single_direction_ratio(n: int, k: int) -> float:
    """Expected energy retained by tau_u on S_k for uniform random u."""
    return (n - 2 + k) / (n - 2 + 2 * k)


def log_dim_harmonic(n: int, k: int) -> float:
    return log(dim_harmonic(n, k))


# ---------------------------------------------------------------------------
# monomials and the Laplacian


@lru_cache(maxsize=None)
def monomials(n: int, k: int) -> tuple:
    """Exponent tuples of all degree-k monomials in n variables (lexicographic)."""
    out = []
    for combo in combinations_with_replacement(range(n), k):
        e = [0] * n
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    return tuple(sorted(out, reverse=True))


def laplacian_matrix(n: int, k: int) -> np.ndarray:
    """Integer matrix of the Laplacian from degree-k to degree-(k-2) monomials."""
    cols = monomials(n, k)
    if k < 2:
        return np.zeros((0, len(cols)), dtype=np.int64)
    rows = {m: i for i, m in enumerate(monomials(n, k - 2))}
    L = np.zeros((len(rows), len(cols)), dtype=np.int64)
    for j, e in enumerate(cols):
        for i in range(n):
            if e[i] >= 2:
                f = list(e)
                f[i] -= 2
                L[rows[tuple(f)], j] += e[i] * (e[i] - 1)
    return L


def _guard(n, k):
    if n > 6 or k > 10:
        raise ValueError("brute-force oracle limited to n <= 6, k <= 10")


def brute_force_harmonic_dim(n: int, k: int) -> int:
    """Kernel dimension of the Laplacian on degree-k homogeneous polynomials."""
    _guard(n, k)
    L = laplacian_matrix(n, k)
    ncols = L.shape[1]
    if L.shape[0] == 0:
        return ncols
    return ncols - int(np.linalg.matrix_rank(L.astype(float)))


def brute_force_invariant_dim(n: int, k: int) -> int:
    """Dimension of harmonic polynomials using only even powers of every variable."""
    _guard(n, k)
    if k % 2:
        return 0
    mons = monomials(n, k)
    even = [j for j, e in enumerate(mons) if all(x % 2 == 0 for x in e)]
    L = laplacian_matrix(n, k)[:, even]
    if L.shape[0] == 0:
        return len(even)
    return len(even) - int(np.linalg.matrix_rank(L.astype(float)))


@dataclass(frozen=True)
class HarmonicPolynomialBasis:
    """Basis of homogeneous harmonic polynomials of degree k in n variables.

    ``coefficients[:, j]`` holds the monomial coefficients of the j-th basis
    polynomial, in the order of :func:`monomials`.
    """

    n: int
    k: int
    coefficients: np.ndarray

    @property
    def exponents(self) -> np.ndarray:
        return np.array(monomials(self.n, self.k), dtype=np.int64).reshape(-1, self.n)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        """Values ``(..., dim)`` of all basis polynomials at points ``x``."""
        x = np.asarray(x, dtype=float)
        mono = np.prod(x[..., None, :] ** self.exponents, axis=-1)
        return mono @ self.coefficients

    def laplacian_residual(self) -> float:
        L = laplacian_matrix(self.n, self.k)
        if L.shape[0] == 0:
            return 0.0
        return float(np.max(np.abs(L @ self.coefficients), initial=0.0))


def harmonic_basis(n: int, k: int) -> HarmonicPolynomialBasis:
    _check_nk(n, k)
    L = laplacian_matrix(n, k).astype(float)
    if L.shape[0] == 0:
        coef = np.eye(len(monomials(n, k)))
    else:
        coef = null_space(L)
    basis = HarmonicPolynomialBasis(n, k, coef)
    if coef.shape[1] != dim_harmonic(n, k) or basis.laplacian_residual() > 1e-9:
        raise ArithmeticError(f"harmonic basis construction failed for n={n}, k={k}")
    return basis


# ---------------------------------------------------------------------------
# zonal harmonics


@dataclass(frozen=True)
class ZonalHarmonic:
    """x -> sqrt(N_k) G_k(<x, pole>), the unit-L2 zonal harmonic of degree k."""

    n: int
    k: int
    pole: np.ndarray

    @property
    def normalization(self) -> float:
        return sqrt(dim_harmonic(self.n, self.k))

    def __call__(self, x) -> np.ndarray:
        t = np.clip(np.asarray(x, dtype=float) @ self.pole, -1.0, 1.0)
        return self.normalization * gegenbauer_all(self.n, self.k, t)[self.k]


def zonal(n: int, k: int, pole) -> ZonalHarmonic:
    _check_nk(n, k)
    pole = unit(pole)
    if pole.shape != (n,):
        raise ValueError("pole dimension mismatch")
    return ZonalHarmonic(n, k, pole)


@dataclass(frozen=True)
class HarmonicMixture:
    """Linear combination of zonal harmonics; also a plain sphere function."""

    terms: tuple  # of (coefficient, ZonalHarmonic)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return sum(c * z(x) for c, z in self.terms)

    @property
    def degrees(self):
        return sorted({z.k for _, z in self.terms})

    def norm2_exact(self) -> float:
        """Squared L2 norm from the reproducing-kernel identity (grid free)."""
        total = 0.0
        for (c1, z1), (c2, z2) in product(self.terms, repeat=2):
            if z1.k == z2.k:
                total += c1 * c2 * float(gegenbauer(z1.n, z1.k, np.clip(z1.pole @ z2.pole, -1, 1)))
        return total


def random_harmonic(rng: RngStream, n: int, k: int, count: int | None = None) -> HarmonicMixture:
    """Random element of S_k: Gaussian combination of zonals at uniform poles,
    scaled to unit L2 norm."""
    count = count or min(2 * dim_harmonic(n, k), 64)
    poles = sample_uniform_sphere(rng, n, size=count)
    coefs = rng.standard_normal(count)
    mix = HarmonicMixture(tuple((float(c), zonal(n, k, p)) for c, p in zip(coefs, poles)))
    s = 1.0 / sqrt(mix.norm2_exact())
    return HarmonicMixture(tuple((c * s, z) for c, z in mix.terms))


# ---------------------------------------------------------------------------
# projections and spectra


@dataclass(frozen=True)
class DegreeSpectrum:
    energies: np.ndarray  # E_k for k = 0..kmax
    norm2: float
    clamped: tuple = ()

    @property
    def kmax(self) -> int:
        return len(self.energies) - 1

    def __getitem__(self, k):
        return self.energies[k]


def _values(f, grid):
    vals = f(grid.nodes) if callable(f) else np.asarray(f, dtype=float)
    vals = np.asarray(vals, dtype=float)
    if vals.shape != (grid.size,):
        raise ValueError("f must be sampled on the grid nodes")
    if not np.all(np.isfinite(vals)):
        raise ValueError("non-finite samples")
    return vals


def project_degree(f, k: int, grid: SphereGrid, chunk: int = 2048):
    """Kernel projection onto S_k by quadrature.

    Returns ``(proj_values, energy)`` where ``proj(x) = N_k sum_j w_j
    G_k(<x, y_j>) f(y_j)`` and ``energy = sum_i w_i f_i proj_i``.
    """
    vals = _values(f, grid)
    n = grid.dim
    nk = dim_harmonic(n, k)
    wf = grid.weights * vals
    proj = np.empty(grid.size)
    for lo in range(0, grid.size, chunk):
        gram = np.clip(grid.nodes[lo:lo + chunk] @ grid.nodes.T, -1.0, 1.0)
        proj[lo:lo + chunk] = nk * (gegenbauer_all(n, k, gram)[k] @ wf)
    return proj, float(wf @ proj)


@lru_cache(maxsize=None)
def _moment_tables(n: int, j: int):
    exps = np.array(monomials(n, j), dtype=np.int64).reshape(-1, n)
    mult = np.array([factorial(j) / np.prod([factorial(int(a)) for a in e]) for e in exps])
    return exps, mult


def degree_spectrum(f, grid: SphereGrid, kmax: int) -> DegreeSpectrum:
    """Energies ||Proj_{S_k} f||^2 for k = 0..kmax.

    Algebraically identical to the double-sum kernel formula of
    :func:`project_degree` on the same grid, evaluated through weighted
    monomial moments: sum_{ij} w_i w_j f_i f_j <x_i,x_j>^p equals
    sum_{|a|=p} p!/a! (sum_i w_i f_i x_i^a)^2.
    """
    vals = _values(f, grid)
    n = grid.dim
    mean = float(grid.weights @ vals)
    wf = grid.weights * (vals - mean)
    kernel_sums = []
    for p in range(kmax + 1):
        exps, mult = _moment_tables(n, p)
        mom = wf @ grid.monomial_matrix(exps)
        kernel_sums.append(float(mult @ mom**2))
    energies = np.zeros(kmax + 1)
    energies[0] = mean**2
    for k in range(1, kmax + 1):
        coef = gegenbauer_coefficients(n, k)
        energies[k] = dim_harmonic(n, k) * sum(c * kernel_sums[j] for j, c in enumerate(coef) if c)
    clamped = []
    for k in range(kmax + 1):
        if energies[k] < 0:
            if energies[k] < -C.ENERGY_CLAMP:
                log_.warning("negative energy %.3e at degree %d clamped", energies[k], k)
            clamped.append(k)
            energies[k] = 0.0
    return DegreeSpectrum(energies, float(grid.weights @ vals**2), tuple(clamped))


# ---------------------------------------------------------------------------
# orthogonal symmetrization of sphere functions


def sign_vectors(n: int, rng: RngStream | None = None) -> np.ndarray:
    """All 2^n sign vectors for n <= 12, else SIGN_SAMPLES uniform draws."""
    if n <= C.EXACT_SIGN_MAX_DIM:
        return np.array(list(product((1.0, -1.0), repeat=n)))
    if rng is None:
        raise ValueError(f"n > {C.EXACT_SIGN_MAX_DIM} requires an rng for sampled signs")
    return rng.choice((1.0, -1.0), size=(C.SIGN_SAMPLES, n))


def sign_flip_maps(basis: np.ndarray, signs: np.ndarray) -> np.ndarray:
    """Matrices U diag(eps) U^T for each sign vector; shape ``(S, n, n)``."""
    return np.einsum("ij,sj,kj->sik", basis, signs, basis)


def orthogonal_symmetrize_function(f: Callable, basis: np.ndarray, points: np.ndarray,
                                   rng: RngStream | None = None) -> np.ndarray:
    """f'(x) = E_eps f(sum_i eps_i <x, e_i> e_i) at ``points``."""
    signs = sign_vectors(basis.shape[0], rng)
    maps = sign_flip_maps(basis, signs)
    acc = np.zeros(len(points))
    for D in maps:
        acc += f(points @ D)
    return acc / len(maps)


def _zonal_symmetrized(g: ZonalHarmonic, basis, nodes, rng=None):
    # g(D x) = sqrt(N) G_k(<x, D a>) since D is symmetric
    signs = sign_vectors(basis.shape[0], rng)
    b = basis.T @ g.pole
    poles = (signs * b) @ basis.T  # rows D_eps a
    t = np.clip(nodes @ poles.T, -1.0, 1.0)
    return g.normalization * gegenbauer_all(g.n, g.k, t)[g.k].mean(axis=1)


# ---------------------------------------------------------------------------
# Monte Carlo verifiers


@dataclass(frozen=True)
class MCEstimate:
    estimate: float
    stderr: float
    reference: float
    trials: int

    def within(self, sigmas: float = 3.0, slack: float = 0.0) -> bool:
        return abs(self.estimate - self.reference) <= sigmas * self.stderr + slack


def _mean_se(samples):
    s = np.asarray(samples, dtype=float)
    return float(s.mean()), float(s.std(ddof=1) / sqrt(len(s))) if len(s) > 1 else 0.0


def verify_lemma1(n: int, k: int, x, y, trials: int, rng: RngStream) -> MCEstimate:
    """Haar average of g(U^-1 x) g(U^-1 y) for the unit zonal g; expect G_k(<x,y>)."""
    if trials < 100:
        raise ValueError("trials must be >= 100")
    x, y = unit(x), unit(y)
    g = zonal(n, k, np.eye(n)[0])
    samples = np.empty(trials)
    for i in range(trials):
        U = sample_haar_basis(rng, n)
        samples[i] = g(U.T @ x) * g(U.T @ y)
    est, se = _mean_se(samples)
    return MCEstimate(est, se, float(gegenbauer(n, k, np.clip(x @ y, -1, 1))), trials)


def verify_lemma2(n: int, k: int, f, trials: int, rng: RngStream, grid: SphereGrid) -> MCEstimate:
    """Haar average of (int f(Ux) g(x) dsigma)^2 with g a unit zonal of degree k.

    The reference is E_k / N_k with E_k from the kernel projection.
    """
    if trials < 100:
        raise ValueError("trials must be >= 100")
    vals = _values(f, grid)
    wf = grid.weights * vals
    nk = dim_harmonic(n, k)
    a = np.eye(n)[0]
    samples = np.empty(trials)
    for i in range(trials):
        U = sample_haar_basis(rng, n)
        # int f(Ux) g(x) = int f(y) g(U^T y) = sqrt(N) sum w f G_k(<y, U a>)
        t = np.clip(grid.nodes @ (U @ a), -1.0, 1.0)
        samples[i] = (sqrt(nk) * (wf @ gegenbauer_all(n, k, t)[k])) ** 2
    est, se = _mean_se(samples)
    _, energy = project_degree(vals, k, grid)
    return MCEstimate(est, se, energy / nk, trials)


@dataclass(frozen=True)
class Prop7Result:
    empirical: float
    stderr: float
    exact: float
    upper_bound: float
    trials: int

    def within(self, sigmas=3.0):
        return abs(self.empirical - self.exact) <= sigmas * self.stderr


def verify_prop7(n: int, k: int, trials: int, rng: RngStream, grid: SphereGrid) -> Prop7Result:
    """Haar-average energy ratio of an orthogonally symmetrized degree-k zonal.

    The pole is drawn uniformly each trial, so quadrature error on a fixed
    Monte Carlo grid averages out instead of biasing the mean.
    """
    if k % 2 or k < 2:
        raise ValueError("k must be even and >= 2")
    if trials < 500:
        raise ValueError("trials must be >= 500")
    if n > C.EXACT_SIGN_MAX_DIM:
        raise ValueError(f"exact sign enumeration supports n <= {C.EXACT_SIGN_MAX_DIM}")
    samples = np.empty(trials)
    for i in range(trials):
        g = zonal(n, k, sample_uniform_sphere(rng, n))
        U = sample_haar_basis(rng, n)
        gp = _zonal_symmetrized(g, U, grid.nodes)
        samples[i] = grid.weights @ gp**2
    est, se = _mean_se(samples)
    exact = exact_ratio(n, k)
    bound = ratio_upper_bound(n, k)
    if not exact < bound:
        raise ArithmeticError("exact ratio violates its upper bound")
    return Prop7Result(est, se, exact, bound, trials)


def verify_corollary8(n: int, f, trials: int, rng: RngStream, grid: SphereGrid) -> MCEstimate:
    """Mean of ||f'||/||f|| over Haar bases; reference is the bound sqrt(2/n)."""
    if trials < 500:
        raise ValueError("trials must be >= 500")
    vals = _values(f, grid)
    if abs(grid.weights @ vals) > max(grid.tau, 1e-9) * max(1.0, np.abs(vals).max()):
        raise ValueError("f must have zero mean")
    norm = sqrt(grid.weights @ vals**2)
    samples = np.empty(trials)
    for i in range(trials):
        U = sample_haar_basis(rng, n)
        fp = orthogonal_symmetrize_function(f, U, grid.nodes)
        samples[i] = sqrt(grid.weights @ fp**2) / norm
    est, se = _mean_se(samples)
    return MCEstimate(est, se, sqrt(2.0 / n), trials)


def verify_remark_single_direction(n: int, k: int, trials: int, rng: RngStream,
                                   grid: SphereGrid) -> MCEstimate:
    """Mean of ||tau_u g||^2 / ||g||^2 over uniform u, tau_u g = (g + g o pi_u)/2."""
    if trials < 500:
        raise ValueError("trials must be >= 500")
    samples = np.empty(trials)
    for i in range(trials):
        g = zonal(n, k, sample_uniform_sphere(rng, n))
        u = sample_uniform_sphere(rng, n)
        refl_pole = g.pole - 2 * (g.pole @ u) * u
        t = np.clip(grid.nodes @ refl_pole, -1, 1)
        vals = 0.5 * (g(grid.nodes) + g.normalization * gegenbauer_all(n, k, t)[k])
        samples[i] = grid.weights @ vals**2
    est, se = _mean_se(samples)
    return MCEstimate(est, se, single_direction_ratio(n, k), trials)


def check_linfinity_bound(n: int, k: int, g, grid: SphereGrid, extra_points=None) -> tuple:
    """Compare sup|g| on ``grid`` (plus ``extra_points``) with sqrt(N_k)||g||_2.

    ``g`` needs ``norm2_exact`` (a :class:`HarmonicMixture`) or is a
    :class:`ZonalHarmonic` (unit norm). Returns ``(holds, sup, bound)``.
    """
    pts = grid.nodes if extra_points is None else np.vstack([grid.nodes, extra_points])
    sup = float(np.max(np.abs(g(pts))))
    norm = 1.0 if isinstance(g, ZonalHarmonic) else sqrt(g.norm2_exact())
    bound = sqrt(dim_harmonic(n, k)) * norm
    return sup <= bound * (1 + grid.tau), sup, bound


def check_lemma10(n: int, k: int, eps: float, c1: float = C.LEMMA10_C1) -> bool:
    """N_k^{c1 (1+log(1+2/eps)) / (1+log(1+k/n))} > n / eps^3, compared in log space."""
    if n < 3 or k < 2 or eps <= 0:
        raise ValueError("requires n >= 3, k >= 2, eps > 0")
    expo = c1 * (1 + log(1 + 2 / eps)) / (1 + log(1 + k / n))
    return expo * log(dim_harmonic(n, k)) > log(n) - 3 * log(eps)


def check_lemma11(n: int, k: int, c2: float = C.LEMMA11_C2) -> bool:
    """(N_k^0/N_k)^T < 1/N_k with T = c2 (1 + log(1 + k/n)), in log space."""
    if n < 3 or k < 2 or k % 2:
        raise ValueError("requires n >= 3 and even k >= 2")
    T = c2 * (1 + log(1 + k / n))
    lnk = log(dim_harmonic(n, k))
    return T * (log(dim_invariant(n, k)) - lnk) < -lnk


def comparison_row(n: int, k: int = 2) -> tuple:
    """((n-2+k)/(n-2+2k))^n against e^-2: n random directions vs one basis."""
    return single_direction_ratio(n, k) ** n, exp(-2.0)
