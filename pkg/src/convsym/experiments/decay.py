"""Monte Carlo decay tables for symmetrized spherical harmonics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..geometry import RngStream, SphereGrid, build_grid, sample_haar_basis, sample_uniform_sphere
from ..harmonics import (_zonal_symmetrized, comparison_row, dim_harmonic, dim_invariant,
                         exact_ratio, ratio_upper_bound, single_direction_ratio, verify_prop7,
                         verify_remark_single_direction, zonal)


@dataclass(frozen=True)
class DecayRow:
    n: int
    k: int
    dim: int
    dim_invariant: int
    empirical: float
    stderr: float
    exact: float
    bound: float
    single_empirical: float
    single_stderr: float
    single_exact: float
    trials: int

    header = ("n", "k", "N_k", "N0_k", "empirical", "stderr", "exact", "bound",
              "single_empirical", "single_stderr", "single_exact", "trials")

    def row(self) -> tuple:
        return (self.n, self.k, self.dim, self.dim_invariant, self.empirical, self.stderr,
                self.exact, self.bound, self.single_empirical, self.single_stderr,
                self.single_exact, self.trials)


@dataclass(frozen=True)
class ComparisonRow:
    """(n/(n+2))^n, the expected degree-2 decay from n single random
    directions, against e^-2 (one random orthonormal basis gives 2/(n+2))."""

    n: int
    value: float
    limit: float

    @property
    def relative_gap(self) -> float:
        return abs(self.value - self.limit) / self.limit


@dataclass(frozen=True)
class DecayTable:
    rows: tuple
    comparisons: tuple


def decay_row(n: int, k: int, trials: int, rng: RngStream, grid: SphereGrid) -> DecayRow:
    nk, n0 = dim_harmonic(n, k), dim_invariant(n, k)
    if k == 0:
        # constants are fixed by every symmetrization
        return DecayRow(n, 0, 1, 1, 1.0, 0.0, 1.0, float("nan"), 1.0, 0.0, 1.0, trials)
    single = verify_remark_single_direction(n, k, trials, rng, grid)
    if k % 2:
        worst = 0.0
        for _ in range(min(trials, 50)):
            g = zonal(n, k, sample_uniform_sphere(rng, n))
            vals = _zonal_symmetrized(g, sample_haar_basis(rng, n), grid.nodes)
            worst = max(worst, float(np.abs(vals).max()))
        return DecayRow(n, k, nk, n0, worst**2, 0.0, 0.0, float("nan"), single.estimate,
                        single.stderr, single.reference, trials)
    p7 = verify_prop7(n, k, trials, rng, grid)
    return DecayRow(n, k, nk, n0, p7.empirical, p7.stderr, p7.exact, ratio_upper_bound(n, k),
                    single.estimate, single.stderr, single.reference, trials)


def run_decay_suite(ns, ks, trials: int, rng: RngStream, grids: dict | None = None,
                    comparison_ns=(50,)) -> DecayTable:
    """One row per (n, k) plus the degree-2 comparison rows."""
    grids = dict(grids or {})
    rows = []
    for n in ns:
        grid = grids.get(n) or build_grid(n)
        grids[n] = grid
        for k in ks:
            rows.append(decay_row(n, k, trials, rng, grid))
    comps = tuple(ComparisonRow(m, *comparison_row(m, 2)) for m in comparison_ns)
    return DecayTable(tuple(rows), comps)
