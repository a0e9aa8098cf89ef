"""Geometric functionals (M*, volume, ball gauges) and the inequality checks
built from them: Bokowski-Heil, its sharpened corollary, Urysohn and the
small-cap lemma."""

from __future__ import annotations

from dataclasses import dataclass
from math import gamma, pi

import numpy as np
from scipy.spatial import ConvexHull

from .. import constants as C
from ..geometry import SphereGrid
from .polygon import PolygonBody
from .polytope import PolytopeBody3
from .support import Ball, GridBody, Polytope, SupportBody, Zonotope


def unit_ball_volume(n: int) -> float:
    return pi ** (n / 2) / gamma(n / 2 + 1)


def mean_width_half(body: SupportBody, grid: SphereGrid) -> float:
    """M*(K) = int h_K dsigma by quadrature on ``grid``."""
    if body.dim != grid.dim:
        raise ValueError("dimension mismatch")
    return grid.integrate(body.support(grid.nodes))


def exact_mean_width_half(body: SupportBody) -> float | None:
    """Closed-form M* where available (ball, 2D polygon, 3D polytope)."""
    if isinstance(body, Ball):
        return float(body.radius)
    if isinstance(body, (PolygonBody, PolytopeBody3)):
        return body.mean_width_half()
    if isinstance(body, Polytope) and body.dim == 2:
        return PolygonBody.from_points(body.vertices).mean_width_half()
    if isinstance(body, Polytope) and body.dim == 3:
        return PolytopeBody3(body.vertices).mean_width_half()
    return None


def volume(body: SupportBody) -> float:
    """Volume of bodies with an explicit description."""
    if isinstance(body, Ball):
        return unit_ball_volume(body.dim) * body.radius**body.dim
    if isinstance(body, PolygonBody):
        return body.area()
    if isinstance(body, PolytopeBody3):
        return body.volume()
    if isinstance(body, Polytope):
        hull = ConvexHull(body.vertices)
        return float(hull.volume)
    if isinstance(body, Zonotope):
        g = body.generators
        if len(g) <= 12:
            corners = np.array(np.meshgrid(*[[-1.0, 1.0]] * len(g), indexing="ij")).reshape(len(g), -1).T
            pts = corners @ g
            if np.linalg.matrix_rank(g) < body.dim:
                return 0.0
            return float(ConvexHull(pts).volume)
    raise TypeError(f"no volume available for {type(body).__name__}")


@dataclass(frozen=True)
class BallGauge:
    """Inclusion certificate (1 - eps) M* D subset K subset (1 + eps) M* D.

    ``caveat`` records how the radii were obtained: ``"grid"`` values are
    node extrema and carry the grid's interpolation error.
    """

    r_in: float
    r_out: float
    mean_width_half: float
    eps_distance: float
    caveat: str = "grid"

    def __post_init__(self):
        slack = 1e-9 * max(1.0, self.r_out)
        if not (self.r_in <= self.mean_width_half + slack and self.mean_width_half <= self.r_out + slack):
            raise ValueError("gauge violates r_in <= M* <= r_out")

    @classmethod
    def from_radii(cls, r_in, r_out, mstar, caveat="grid") -> "BallGauge":
        eps = max(r_out / mstar - 1.0, 1.0 - r_in / mstar, 0.0)
        return cls(float(r_in), float(r_out), float(mstar), float(eps), caveat)


def ball_gauge(body: SupportBody, grid: SphereGrid, values: np.ndarray | None = None,
               allow_flat: bool = False) -> BallGauge:
    """Gauge from node values of h: r_out = max h, r_in = min h, M* by quadrature.

    Raises when h is not positive somewhere, since the pointwise test then
    says nothing (the origin is not interior). With ``allow_flat`` a
    lower-dimensional body through the origin (min h = 0 up to rounding) is
    accepted and gets r_in = 0.
    """
    if values is None:
        values = body.values if isinstance(body, GridBody) and body.grid is grid else body.support(grid.nodes)
    values = np.asarray(values, dtype=float)
    lo = float(values.min())
    if allow_flat and lo > -1e-12 * max(1.0, float(values.max())):
        lo = max(lo, 0.0)
    elif lo <= 0:
        raise ValueError("support function is not positive on the grid: recenter the body "
                         "so the origin is interior")
    return BallGauge.from_radii(lo, values.max(), grid.integrate(values), "grid")


def polygon_gauge(poly: PolygonBody) -> BallGauge:
    """Exact gauge of a polygon about the origin."""
    r_in = poly.inradius()
    if r_in <= 0:
        raise ValueError("origin is not interior to the polygon: recenter first")
    return BallGauge.from_radii(r_in, poly.circumradius(), poly.mean_width_half(), "exact")


def polytope3_gauge(body: PolytopeBody3) -> BallGauge:
    return BallGauge.from_radii(body.inradius(), body.circumradius(), body.mean_width_half(), "exact")


def gauge(body: SupportBody, grid: SphereGrid | None = None) -> BallGauge:
    """Exact gauge for polygons / 3D polytopes, node-based otherwise."""
    if isinstance(body, PolygonBody):
        return polygon_gauge(body)
    if isinstance(body, PolytopeBody3):
        return polytope3_gauge(body)
    if grid is None:
        raise ValueError("a grid is required for this body type")
    return ball_gauge(body, grid)


# ---------------------------------------------------------------------------
# inequalities


@dataclass(frozen=True)
class Residual:
    value: float
    tolerance: float
    R: float
    volume_ratio: float
    mstar: float

    @property
    def holds(self) -> bool:
        return self.value >= -self.tolerance


def _exactish(body, grid):
    """(R, M*, tolerance on M*) using closed forms when available."""
    mstar = exact_mean_width_half(body)
    if isinstance(body, (PolygonBody, PolytopeBody3, Polytope)):
        R = float(np.linalg.norm(body.vertices, axis=1).max())
    elif isinstance(body, Ball):
        R = float(body.radius)
    else:
        R = None
    if mstar is not None and R is not None:
        return R, mstar, 1e-12 * max(1.0, R)
    if grid is None:
        raise ValueError("a grid is required for this body type")
    vals = body.support(grid.nodes)
    if R is None:
        R = float(vals.max())
    if mstar is None:
        mstar = grid.integrate(vals)
    return R, mstar, grid.tau * max(1.0, R)


def bokowski_heil_residual(body: SupportBody, grid: SphereGrid | None = None,
                           R: float | None = None) -> Residual:
    """Vol(K)/Vol(D) + (n^2 - 1) R^n - n^2 R^(n-1) M*(K).

    ``R`` defaults to the circumradius about the origin (exact for polytopes,
    node maximum otherwise). The tolerance is the M* error budget times the
    coefficient n^2 R^(n-1), plus rounding.
    """
    n = body.dim
    R0, mstar, m_tol = _exactish(body, grid)
    R = R0 if R is None else float(R)
    vr = volume(body) / unit_ball_volume(n)
    res = vr + (n * n - 1) * R**n - n * n * R ** (n - 1) * mstar
    tol = n * n * R ** (n - 1) * m_tol + 1e-12 * max(1.0, R**n) * n * n
    return Residual(float(res), float(tol), R, vr, mstar)


def _normalization(body, tol=1e-6):
    vr = volume(body) / unit_ball_volume(body.dim)
    if abs(vr - 1.0) > tol:
        raise ValueError(f"body volume must equal the unit ball volume (ratio {vr:.9g})")
    return vr


@dataclass(frozen=True)
class Corollary14Result:
    eps: float
    mstar: float
    bound: float
    holds: bool
    sharp_bound: float | None
    sharp_holds: bool | None

    def __bool__(self):
        return self.holds and self.sharp_holds is not False


def corollary14_check(body: SupportBody, grid: SphereGrid | None = None,
                      eps: float | None = None) -> Corollary14Result:
    """For Vol(K) = Vol(D) and K subset (1 + eps)D check
    M* < 1 + (1 - 1/n^2) eps, and M* < 1 + (1 - 1/(2n)) eps when eps < 1/n.

    ``eps`` defaults to R(K) - 1; a larger value may be passed (the inclusion
    still holds), which is how the equality case K = D is probed.
    """
    _normalization(body)
    n = body.dim
    R, mstar, m_tol = _exactish(body, grid)
    if eps is None:
        eps = R - 1.0
    if eps < R - 1.0 - 1e-12:
        raise ValueError("eps smaller than R(K) - 1: inclusion K in (1+eps)D fails")
    if eps <= 0:
        raise ValueError("corollary needs eps > 0")
    bound = 1 + (1 - 1 / n**2) * eps
    holds = mstar < bound + m_tol
    sharp = sharp_holds = None
    if eps < 1 / n:
        sharp = 1 + (1 - 1 / (2 * n)) * eps
        sharp_holds = bool(mstar < sharp + m_tol)
    return Corollary14Result(float(eps), float(mstar), float(bound), bool(holds), sharp, sharp_holds)


@dataclass(frozen=True)
class CheckResult:
    holds: bool
    value: float
    threshold: float
    applicable: bool = True

    def __bool__(self):
        return self.holds or not self.applicable


def urysohn_check(body: SupportBody, grid: SphereGrid | None = None) -> CheckResult:
    """Vol(K) = Vol(D) implies M*(K) >= 1."""
    _normalization(body)
    _, mstar, m_tol = _exactish(body, grid)
    return CheckResult(bool(mstar >= 1 - m_tol - 1e-9), float(mstar), 1.0)


def small_cap_check(body: SupportBody, eps: float, grid: SphereGrid,
                    c7: float = C.SMALL_CAP_C7, tol: float | None = None) -> CheckResult:
    """If M*(K) >= 1 and K subset (1 + (c7 eps)^n) D then (1 - eps) D subset K.

    The conclusion is tested on node values of h. Unmet preconditions give
    an inapplicable result rather than a failure.
    """
    if not 0 < eps < 1:
        return CheckResult(True, float("nan"), 1 - eps, applicable=False)
    n = body.dim
    if isinstance(body, PolygonBody):
        g = polygon_gauge(body)
        r_out, mstar, min_h = g.r_out, g.mean_width_half, g.r_in
        tol = 1e-12 if tol is None else tol
    else:
        vals = body.support(grid.nodes)
        r_out, mstar, min_h = float(vals.max()), grid.integrate(vals), float(vals.min())
        tol = grid.tau if tol is None else tol
    applicable = mstar >= 1.0 and r_out <= 1 + (c7 * eps) ** n
    threshold = 1 - eps
    return CheckResult(bool(min_h >= threshold - tol), min_h, threshold, applicable=bool(applicable))


def admissible_cap_eps(r_out: float, n: int, c7: float = C.SMALL_CAP_C7) -> float:
    """Smallest eps for which K subset r_out D meets the small-cap precondition."""
    return (max(r_out - 1.0, 0.0)) ** (1.0 / n) / c7
