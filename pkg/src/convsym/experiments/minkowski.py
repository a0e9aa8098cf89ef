"""Randomized orthogonal-symmetrization (Minkowski) process."""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from .. import constants as C
from ..bodies.functionals import ball_gauge
from ..bodies.support import SEED_BODIES, GridBody, orthogonal_symmetrize, seed_body
from ..geometry import SphereGrid, build_grid, derive_seed, make_rng, sample_haar_basis
from ..harmonics import degree_spectrum
from .records import RunRecord


BASIS_MODES = ("haar", "standard", "diagonal")


def diagonal_basis(n: int) -> np.ndarray:
    """Fixed orthonormal basis whose first column is (1, ..., 1)/sqrt(n).

    For n = 2 the columns are +-(1, 1)/sqrt(2) and +-(1, -1)/sqrt(2).
    """
    q, _ = np.linalg.qr(np.column_stack([np.ones(n), np.eye(n)[:, 1:]]))
    return q


def round_basis(mode: str, n: int, rng) -> np.ndarray:
    if mode == "haar":
        return sample_haar_basis(rng, n)
    if mode == "standard":
        return np.eye(n)
    return diagonal_basis(n)


@dataclass(frozen=True)
class MinkowskiRunConfig:
    n: int
    seed_body: str = "cube"
    rounds: int = 40
    resolution: int | None = None
    seed: int = C.DEFAULT_SEED
    epsilons: tuple = (0.1, 0.01, 0.001)
    kmax: int = 4
    basis_mode: str = "haar"
    stop_at_target: bool = True
    grid_seed: int = C.DEFAULT_SEED

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("n must be >= 2")
        if self.rounds < 1:
            raise ValueError("rounds must be >= 1")
        eps = tuple(float(e) for e in self.epsilons)
        if not eps or any(not 0 < e < 0.5 for e in eps):
            raise ValueError("epsilons must lie in (0, 1/2)")
        if list(eps) != sorted(eps, reverse=True):
            raise ValueError("epsilons must be sorted in descending order")
        object.__setattr__(self, "epsilons", eps)
        if self.kmax < 2:
            raise ValueError("kmax must be >= 2")
        if self.basis_mode not in BASIS_MODES:
            raise ValueError(f"basis_mode must be one of {BASIS_MODES}")
        if self.seed_body not in SEED_BODIES:
            raise ValueError(f"seed_body must be one of {SEED_BODIES}")


@lru_cache(maxsize=16)
def run_grid(n: int, resolution: int | None, grid_seed: int) -> SphereGrid:
    return build_grid(n, resolution, seed=grid_seed)


def grid_for(cfg: MinkowskiRunConfig) -> SphereGrid:
    return run_grid(cfg.n, cfg.resolution, cfg.grid_seed)


def _record(rnd, count, values, grid, kmax, t0):
    g = ball_gauge(None, grid, values=values, allow_flat=True)
    spec = degree_spectrum(values, grid, kmax)
    energies = tuple((k, float(spec[k])) for k in range(2, kmax + 1, 2))
    return RunRecord(rnd, count, g.eps_distance, g.mean_width_half, g.r_in, g.r_out,
                     float("nan"), energies, time.perf_counter() - t0)


def run_minkowski_process(cfg: MinkowskiRunConfig) -> list:
    """Round 0 records the seed; each later round draws a basis, applies the
    orthogonal symmetrization on the run grid and records gauges and
    even-degree energies. Stops after ``rounds`` rounds, or earlier once
    eps_distance drops below the smallest target when ``stop_at_target``."""
    grid = grid_for(cfg)
    rng = make_rng(cfg.seed)
    body = seed_body(cfg.seed_body, cfg.n)
    t0 = time.perf_counter()
    values = body.support(grid.nodes)
    records = [_record(0, 0, values, grid, cfg.kmax, t0)]
    target = min(cfg.epsilons)
    for rnd in range(1, cfg.rounds + 1):
        if cfg.stop_at_target and records[-1].eps < target:
            break
        basis = round_basis(cfg.basis_mode, cfg.n, rng)
        body = orthogonal_symmetrize(body, basis, grid, rng)
        records.append(_record(rnd, rnd * cfg.n, body.values, grid, cfg.kmax, t0))
    return records


def ensemble_configs(cfg: MinkowskiRunConfig, runs: int) -> list:
    """Per-run configs with seeds base XOR run index."""
    return [replace(cfg, seed=derive_seed(cfg.seed, i)) for i in range(runs)]


def run_ensemble(cfg: MinkowskiRunConfig, runs: int = 30, workers: int = 1) -> list:
    """Independent runs; the result is ordered by run index whatever the
    execution order."""
    cfgs = ensemble_configs(cfg, runs)
    if workers <= 1:
        return [run_minkowski_process(c) for c in cfgs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run_minkowski_process, cfgs))
