"""Ensemble diagnostics for the Minkowski process: mean-width drift, decay
of the median eps_distance, rounds-to-eps fit and per-round energy decay."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import constants as C
from ..harmonics import exact_ratio
from .fitting import RateFit, fit_rate
from .minkowski import MinkowskiRunConfig, grid_for, run_ensemble


@dataclass(frozen=True)
class EnergyDecay:
    """Per-round retention E_k(t+1)/E_k(t) of the degree-k energy.

    Every run contributes the mean of its first ``window`` ratios, a number
    fixed in advance from the seed energy and the exact rate so that the
    expected energy stays above ``floor``. A run-dependent cut-off (stop
    when the energy hits the floor) would bias the mean low, since runs with
    small early ratios would stop first. ``mean``/``stderr`` are taken
    across the independent runs.
    """

    degree: int
    mean: float
    stderr: float
    exact: float
    runs: int
    window: int
    floor: float

    def within(self, sigmas: float = 3.0) -> bool:
        return abs(self.mean - self.exact) <= sigmas * self.stderr


@dataclass(frozen=True)
class ConvergenceReport:
    n: int
    seed_body: str
    runs: int
    tau: float
    floor: float
    max_drift: float
    fit: RateFit
    energy: EnergyDecay | None
    median_eps: tuple

    @property
    def drift_ok(self) -> bool:
        return self.max_drift <= 10 * self.tau

    @property
    def decays(self) -> bool:
        return self.fit.ok and self.fit.rho_ci[1] < 1 and self.fit.monotone


def mean_width_drift(runs) -> float:
    """Largest relative change of M* from round 0 over all runs and rounds."""
    worst = 0.0
    for recs in runs:
        m0 = recs[0].mstar
        worst = max(worst, max(abs(r.mstar - m0) / m0 for r in recs))
    return worst


def lowest_active_degree(runs, kmax: int, floor: float = 0.0, rtol: float = 1e-8) -> int | None:
    """Smallest even degree k >= 2 whose round-0 energy exceeds ``floor`` and
    is non-negligible relative to the total non-constant energy of the seed."""
    rec = runs[0][0]
    total = sum(e for _, e in rec.energies)
    for k in range(2, kmax + 1, 2):
        if rec.energy(k) > max(rtol * total, floor, 1e-300):
            return k
    return None


def energy_window(e0: float, rate: float, floor: float, available: int) -> int:
    """Rounds t with e0 rate^t >= floor, capped by the rounds recorded."""
    if e0 <= floor:
        return 0
    return int(min(available, np.floor(np.log(floor / e0) / np.log(rate)) + 1))


def energy_decay(runs, degree: int, n: int, floor: float) -> EnergyDecay:
    exact = exact_ratio(n, degree)
    length = min(len(r) for r in runs)
    window = energy_window(runs[0][0].energy(degree), exact, floor, length - 1)
    if window < 1 or len(runs) < 2:
        raise ValueError("not enough energy above the floor to estimate a decay")
    per_run = []
    for recs in runs:
        e = np.array([r.energy(degree) for r in recs[: window + 1]])
        per_run.append((e[1:] / e[:-1]).mean())
    per_run = np.asarray(per_run)
    se = float(per_run.std(ddof=1) / np.sqrt(len(per_run)))
    return EnergyDecay(degree, float(per_run.mean()), se, exact, len(per_run), window, floor)


def energy_floor(tau: float) -> float:
    """Energies below (10 tau)^2 are dominated by grid interpolation error."""
    return (10 * tau) ** 2


def analyze(runs, cfg: MinkowskiRunConfig, tau: float) -> ConvergenceReport:
    floor = 10 * tau
    fit = fit_rate(runs, cfg.epsilons, floor=floor, n=cfg.n, tau=tau)
    degree = lowest_active_degree(runs, cfg.kmax, energy_floor(tau))
    energy = None
    if degree is not None:
        energy = energy_decay(runs, degree, cfg.n, energy_floor(tau))
    eps = np.array([[r.eps for r in recs] for recs in runs])
    return ConvergenceReport(cfg.n, cfg.seed_body, len(runs), tau, floor, mean_width_drift(runs),
                             fit, energy, tuple(float(v) for v in np.median(eps, axis=0)))


def minkowski_convergence(n: int, seed_body: str, runs: int = 30, rounds: int = 12,
                          resolution: int | None = None, seed: int = C.DEFAULT_SEED,
                          kmax: int = 6, workers: int = 1) -> tuple:
    """Run a fixed-length ensemble and analyze it; returns ``(report, runs)``."""
    cfg = MinkowskiRunConfig(n=n, seed_body=seed_body, rounds=rounds, resolution=resolution,
                             seed=seed, kmax=kmax, stop_at_target=False)
    data = run_ensemble(cfg, runs, workers=workers)
    return analyze(data, cfg, grid_for(cfg).tau), data


def summary_line(rep: ConvergenceReport) -> str:
    f, e = rep.fit, rep.energy
    parts = [f"n={rep.n}", f"body={rep.seed_body}", f"runs={rep.runs}",
             f"drift={rep.max_drift:.2e}", f"drift_limit={10 * rep.tau:.2e}",
             f"rho={f.rho:.4f}", f"rho_ci_hi={f.rho_ci[1]:.4f}", f"monotone={f.monotone}",
             f"r2={f.r_squared:.4f}"]
    if e is not None:
        parts += [f"E{e.degree}_ratio={e.mean:.4f}", f"se={e.stderr:.4f}", f"exact={e.exact:.4f}"]
    return " ".join(parts)

