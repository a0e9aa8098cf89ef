"""Randomized Steiner-symmetrization process (exact in 2D, sampled in 3D)."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from math import pi

import numpy as np

from .. import constants as C
from ..bodies.functionals import admissible_cap_eps, polygon_gauge, polytope3_gauge, unit_ball_volume
from ..bodies.polygon import (PolygonBody, decimate, random_polygon, rectangle, regular_polygon,
                              restore_area, steiner_symmetrize_polygon)
from ..bodies.polytope import (PolytopeBody3, cube3, random_polytope3, sampled_ball,
                               steiner_symmetrize_sampled3)
from ..geometry import make_rng, sample_haar_basis
from .records import RunRecord

STEINER_SEEDS = {2: ("rectangle", "random", "disk", "triangle"), 3: ("cube", "random", "ball")}


class NumericalAbort(RuntimeError):
    """The discretization error budget was exceeded."""


@dataclass(frozen=True)
class SteinerRunConfig:
    """``phase1_radius`` defaults to 1 + 1/n; phase 2 ends once both
    r_out - 1 and 1 - r_in drop below ``eps``. ``max_vertices`` caps 2D
    polygons (decimation plus area-restoring dilation); ``resolution`` is
    the planar lattice of the 3D sampled symmetrization."""

    n: int = 2
    seed_body: str = "rectangle"
    normalize: bool = True
    eps: float = 0.05
    max_symmetrizations: int = 400
    phase1_radius: float | None = None
    seed: int = C.DEFAULT_SEED
    resolution: int = 64
    max_vertices: int = 2048
    volume_budget: float = 0.02
    aspect: float = 4.0

    def __post_init__(self):
        if self.n not in STEINER_SEEDS:
            raise ValueError("Steiner runs support n in {2, 3}")
        if self.seed_body not in STEINER_SEEDS[self.n]:
            raise ValueError(f"seed_body for n={self.n} must be one of {STEINER_SEEDS[self.n]}")
        if not 0 < self.eps < 1:
            raise ValueError("eps must lie in (0, 1)")
        if self.max_symmetrizations < 1:
            raise ValueError("max_symmetrizations must be >= 1")
        if self.resolution < 16:
            raise ValueError("resolution must be >= 16")
        if self.max_vertices < 16:
            raise ValueError("max_vertices must be >= 16")

    @property
    def phase1(self) -> float:
        return 1 + 1 / self.n if self.phase1_radius is None else self.phase1_radius


@dataclass
class SteinerRun:
    records: list
    phase_switch: int | None = None
    cap_checks: int = 0
    cap_passes: int = 0
    max_step_volume_error: float = 0.0
    config: SteinerRunConfig | None = None

    def __iter__(self):
        return iter(self.records)

    def __len__(self):
        return len(self.records)


def make_seed(cfg: SteinerRunConfig, rng) -> PolygonBody | PolytopeBody3:
    name = cfg.seed_body
    if cfg.n == 2:
        if name == "rectangle":
            body = rectangle(cfg.aspect, 1.0)
        elif name == "disk":
            body = regular_polygon(256)
        elif name == "triangle":
            body = PolygonBody(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]), "triangle")
        else:
            body = random_polygon(rng, 12)
        body = body.translated(-body.centroid())
        target = pi
    else:
        if name == "cube":
            body = cube3()
        elif name == "ball":
            body = sampled_ball(500)
        else:
            body = random_polytope3(rng, 20)
        body = body.translated(-body.centroid())
        target = unit_ball_volume(3)
    if cfg.normalize:
        body = body.normalized_area(target) if cfg.n == 2 else body.normalized_volume(target)
    return body


def _gauge(body):
    g = polygon_gauge(body) if isinstance(body, PolygonBody) else polytope3_gauge(body)
    vol = body.area() if isinstance(body, PolygonBody) else body.volume()
    return g, vol


def _step(body, u, cfg, vol0):
    if isinstance(body, PolygonBody):
        out = steiner_symmetrize_polygon(body, u)
        if len(out.vertices) > cfg.max_vertices:
            area = out.area()
            out = restore_area(decimate(out, cfg.max_vertices // 2), area)
        return out, 0.0
    out, err = steiner_symmetrize_sampled3(body, u, cfg.resolution, return_error=True)
    if err > cfg.volume_budget:
        raise NumericalAbort(f"sampled Steiner step changed the volume by {err:.3%} "
                             f"(budget {cfg.volume_budget:.1%}); raise the resolution")
    # the symmetral has the volume of its input; undo the sampling loss
    return out.scaled(np.cbrt(vol0 / out.volume())), err


def run_steiner_process(cfg: SteinerRunConfig) -> SteinerRun:
    """Each round draws a Haar basis and symmetrizes along its columns in
    index order, recording after every symmetrization. Phase 1 lasts until
    r_out < ``phase1``; phase 2 until max(r_out - 1, 1 - r_in) < eps. Along
    the way the small-cap implication is checked whenever its
    preconditions hold for the smallest admissible eps."""
    rng = make_rng(cfg.seed)
    body = make_seed(cfg, rng)
    n = cfg.n
    t0 = time.perf_counter()
    g, vol0 = _gauge(body)
    radius = (vol0 / unit_ball_volume(n)) ** (1 / n)

    def rec(rnd, count, g, vol):
        eps = max(g.r_out / radius - 1.0, 1.0 - g.r_in / radius, 0.0)
        return RunRecord(rnd, count, eps, g.mean_width_half, g.r_in, g.r_out, vol, (),
                         time.perf_counter() - t0)

    run = SteinerRun([rec(0, 0, g, vol0)], config=cfg)
    count, rnd = 0, 0
    while count < cfg.max_symmetrizations and run.records[-1].eps >= cfg.eps:
        rnd += 1
        basis = sample_haar_basis(rng, n)
        for j in range(n):
            body, err = _step(body, basis[:, j], cfg, vol0)
            run.max_step_volume_error = max(run.max_step_volume_error, err)
            count += 1
            g, vol = _gauge(body)
            run.records.append(rec(rnd, count, g, vol))
            if run.phase_switch is None and g.r_out < cfg.phase1:
                run.phase_switch = count
            eps_cap = admissible_cap_eps(g.r_out / radius, n)
            if 0 < eps_cap < 1 and g.mean_width_half / radius >= 1:
                run.cap_checks += 1
                run.cap_passes += int(g.r_in / radius >= 1 - eps_cap - 1e-12)
            if count >= cfg.max_symmetrizations:
                break
    return run


def contraction_factors(run, below: float = 0.5) -> np.ndarray:
    """Per-round factors (r_out - 1)_{t+1} / (r_out - 1)_t at round ends,
    restricted to rounds that start with r_out - 1 < ``below``."""
    ends = {}
    for r in run.records:
        ends[r.round] = r.rout
    rounds = sorted(ends)
    out = []
    for a, b in zip(rounds, rounds[1:]):
        ea, eb = ends[a] - 1.0, ends[b] - 1.0
        if 0 < ea < below:
            out.append(eb / ea)
    return np.asarray(out)
