"""Decay-rate fits for ensembles of eps_distance sequences."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class RateFit:
    """Empirical geometric rate of eps_distance per round.

    ``rho`` is exp(mean log-ratio) over consecutive rounds above the floor,
    with a normal-approximation 95% interval ``rho_ci``. ``rounds_to_eps``
    maps each target to the ensemble median of the (fractional, log-linearly
    interpolated) first-crossing round, read from all data regardless of the
    floor; ``slope``/``intercept``/``r_squared``
    describe the fit of those medians against log(1/eps). ``count_slope`` is
    the same slope in symmetrizations (n per round), i.e. c_hat * n.
    """

    status: str
    rho: float = float("nan")
    rho_ci: tuple = (float("nan"), float("nan"))
    rounds_to_eps: dict = field(default_factory=dict)
    slope: float = float("nan")
    intercept: float = float("nan")
    r_squared: float = float("nan")
    residuals: tuple = ()
    c_hat: float = float("nan")
    count_slope: float = float("nan")
    median_slope: float = float("nan")
    median_r_squared: float = float("nan")
    floor: float = 0.0
    tail_rounds: tuple = ()
    monotone: bool = True

    @property
    def ok(self) -> bool:
        return self.status == "ok"


def _linfit(x, y):
    x, y = np.asarray(x, float), np.asarray(y, float)
    A = np.column_stack([x, np.ones_like(x)])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    res = y - A @ coef
    ss = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - float((res**2).sum()) / ss if ss > 0 else 1.0
    return float(coef[0]), float(coef[1]), r2, res


def crossing_round(eps: np.ndarray, target: float) -> float:
    """First fractional round where eps falls below ``target`` (NaN if never).

    Between consecutive rounds log eps is interpolated linearly.
    """
    eps = np.asarray(eps, dtype=float)
    below = np.flatnonzero(eps < target)
    if len(below) == 0:
        return float("nan")
    j = below[0]
    if j == 0:
        return 0.0
    a, b = np.log(eps[j - 1]), np.log(max(eps[j], 1e-300))
    return float(j - 1 + (a - np.log(target)) / (a - b))


def _eps_matrix(runs) -> np.ndarray:
    length = max(len(r) for r in runs)
    m = np.full((len(runs), length), np.nan)
    for i, r in enumerate(runs):
        m[i, : len(r)] = [rec.eps if hasattr(rec, "eps") else rec for rec in r]
    return m


def fit_rate(runs, epsilons, floor: float = 0.0, n: int = 1, skip: int = 1,
             tau: float | None = None) -> RateFit:
    """Fit the per-round decay of eps_distance.

    ``runs`` is a list of runs, each a list of :class:`RunRecord` or plain
    eps values indexed by round. Data at or below ``floor`` (typically
    10 tau_grid) is excluded, as are the first ``skip`` rounds (transient).
    A run whose eps is already at the floor in round 0 yields a
    ``"degenerate"`` fit. ``monotone`` reports whether the ensemble median
    never increases by more than ``tau`` (default floor/10) above the floor.
    """
    eps = _eps_matrix(runs)
    if eps.shape[1] < 2:
        raise ValueError("need at least 2 rounds")
    if np.nanmedian(eps[:, 0]) <= max(floor, 1e-15):
        return RateFit("degenerate", floor=floor)
    if eps.shape[1] < 5:
        raise ValueError("need at least 5 rounds of decreasing eps_distance")
    med = np.nanmedian(eps, axis=0)
    above = med > floor
    tail = np.arange(eps.shape[1])
    tail = tail[(tail >= skip) & above]
    # a run can only contribute ratios between rounds that are both above the floor
    logs = []
    for r in range(len(eps)):
        e = eps[r]
        ok = (e > floor) & np.isfinite(e)
        idx = np.arange(len(e))
        pairs = [(i, i + 1) for i in idx[:-1] if i >= skip and ok[i] and ok[i + 1]]
        logs.extend(np.log(e[j] / e[i]) for i, j in pairs)
    logs = np.asarray(logs)
    if len(logs) < 2 or len(tail) < 2:
        return RateFit("degenerate", floor=floor)
    mean, se = float(logs.mean()), float(logs.std(ddof=1) / np.sqrt(len(logs)))
    rho = float(np.exp(mean))
    ci = (float(np.exp(mean - 1.96 * se)), float(np.exp(mean + 1.96 * se)))
    mslope, _, mr2, _ = _linfit(tail, np.log(med[tail]))
    tol = floor / 10 if tau is None else tau
    monotone = bool(np.all(np.diff(med[above]) <= tol + 1e-15))

    table = {}
    for target in epsilons:
        cr = np.array([crossing_round(e[np.isfinite(e)], target) for e in eps])
        # runs that never cross count as infinitely slow
        m = float(np.median(np.where(np.isnan(cr), np.inf, cr)))
        table[float(target)] = m if np.isfinite(m) else float("nan")
    xs = [np.log(1 / t) for t in epsilons if np.isfinite(table[float(t)])]
    ys = [table[float(t)] for t in epsilons if np.isfinite(table[float(t)])]
    slope = intercept = r2 = float("nan")
    res = ()
    if len(xs) >= 2:
        slope, intercept, r2, res = _linfit(xs, ys)
        res = tuple(float(v) for v in res)
    status = "ok" if 0 < rho < 1 else "not-decaying"
    return RateFit(status, rho, ci, table, slope, intercept, r2, res, slope, slope * n, mslope, mr2,
                   floor, tuple(int(t) for t in tail), monotone)
