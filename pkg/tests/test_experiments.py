from math import log, pi

import numpy as np
import pytest

from convsym.experiments.convergence import (EnergyDecay, energy_decay, energy_window,
                                             lowest_active_degree, mean_width_drift)
from convsym.experiments.decay import run_decay_suite
from convsym.experiments.fitting import crossing_round, fit_rate
from convsym.experiments.minkowski import (MinkowskiRunConfig, diagonal_basis, ensemble_configs,
                                           run_ensemble, run_minkowski_process)
from convsym.experiments.records import RunRecord, check_counts
from convsym.experiments.report import emit_report, fmt, records_csv, svg_plot
from convsym.experiments.steiner import (NumericalAbort, SteinerRunConfig, contraction_factors,
                                         run_steiner_process)
from convsym.geometry import is_orthonormal, make_rng


def _rec(r, eps, energies=()):
    return RunRecord(r, 2 * r, eps, 1.0, 1 - eps, 1 + eps, float("nan"), energies)


# ---------------------------------------------------------------------------
# records and fitting


def test_records_equality_ignores_wall_time():
    a = RunRecord(1, 2, 0.1, 1.0, 0.9, 1.1, wall=1.0)
    b = RunRecord(1, 2, 0.1, 1.0, 0.9, 1.1, wall=2.0)
    assert a == b
    check_counts([a, RunRecord(2, 4, 0.1, 1.0, 0.9, 1.1)])
    with pytest.raises(AssertionError):
        check_counts([a, a])


def test_crossing_round():
    eps = np.array([1.0, 0.1, 0.01])
    assert crossing_round(eps, 2.0) == 0.0
    assert crossing_round(eps, 0.0999) == pytest.approx(1 + log(0.1 / 0.0999) / log(10))
    assert crossing_round(eps, np.sqrt(0.1)) == pytest.approx(0.5)
    assert np.isnan(crossing_round(eps, 1e-3))


def test_fit_rate_synthetic_geometric():
    runs = [[_rec(r, 0.4**r) for r in range(20)] for _ in range(5)]
    fit = fit_rate(runs, (0.1, 0.01, 0.001), n=3)
    assert fit.ok
    assert fit.rho == pytest.approx(0.4)
    assert fit.slope == pytest.approx(1 / log(2.5))
    assert fit.count_slope == pytest.approx(3 / log(2.5))
    assert fit.r_squared == pytest.approx(1.0)
    assert fit.monotone


def test_fit_rate_degenerate_and_floor():
    flat = [[_rec(r, 1e-12) for r in range(6)] for _ in range(3)]
    assert fit_rate(flat, (0.1,), floor=1e-9).status == "degenerate"
    runs = [[_rec(r, max(0.5**r, 1e-6)) for r in range(30)] for _ in range(3)]
    fit = fit_rate(runs, (0.1, 0.01, 0.001), floor=1e-5)
    assert fit.rho == pytest.approx(0.5)
    assert max(fit.tail_rounds) < 17
    with pytest.raises(ValueError):
        fit_rate([[_rec(0, 1.0), _rec(1, 0.5), _rec(2, 0.25)]], (0.1,))


def test_fit_rate_detects_growth():
    runs = [[_rec(r, 0.01 * 1.5**r) for r in range(8)] for _ in range(3)]
    fit = fit_rate(runs, (0.1,))
    assert fit.status == "not-decaying"
    assert not fit.monotone


# ---------------------------------------------------------------------------
# Minkowski process


def test_config_validation():
    with pytest.raises(ValueError):
        MinkowskiRunConfig(n=1)
    with pytest.raises(ValueError):
        MinkowskiRunConfig(n=3, epsilons=(0.01, 0.1))
    with pytest.raises(ValueError):
        MinkowskiRunConfig(n=3, seed_body="torus")
    with pytest.raises(ValueError):
        MinkowskiRunConfig(n=3, basis_mode="sobol")


def test_diagonal_basis():
    for n in (2, 3, 5):
        b = diagonal_basis(n)
        assert is_orthonormal(b)
        assert np.allclose(np.abs(b[:, 0]), 1 / np.sqrt(n))


def test_ball_seed_is_at_the_floor():
    recs = run_minkowski_process(MinkowskiRunConfig(n=3, seed_body="ball"))
    assert len(recs) == 1 and recs[0].eps < 1e-12


def test_segment_first_round_value():
    cfg = MinkowskiRunConfig(n=2, seed_body="segment", rounds=1, basis_mode="diagonal",
                             stop_at_target=False)
    recs = run_minkowski_process(cfg)
    assert recs[1].eps == pytest.approx(1 - pi / 4, abs=1e-5)
    assert recs[1].mstar == pytest.approx(2 / pi, abs=1e-5)
    assert recs[1].energy(2) == pytest.approx(0.0, abs=1e-12)


def test_process_invariants():
    cfg = MinkowskiRunConfig(n=3, seed_body="simplex", rounds=6, stop_at_target=False)
    recs = run_minkowski_process(cfg)
    check_counts(recs)
    assert [r.count for r in recs] == [3 * r for r in range(7)]
    m0 = recs[0].mstar
    assert all(abs(r.mstar - m0) <= 10 * 2e-4 for r in recs)
    assert all(r.rin <= r.mstar <= r.rout for r in recs)
    # identical seeds give identical record streams (vol is NaN, so compare text)
    assert records_csv(run_minkowski_process(cfg)) == records_csv(recs)


def test_stops_at_target():
    cfg = MinkowskiRunConfig(n=2, seed_body="cube", rounds=40, epsilons=(0.1, 0.01))
    recs = run_minkowski_process(cfg)
    assert recs[-1].eps < 0.01 and all(r.eps >= 0.01 for r in recs[:-1])


def test_ensemble_order_and_workers():
    cfg = MinkowskiRunConfig(n=2, seed_body="cube", rounds=4, stop_at_target=False)
    seeds = [c.seed for c in ensemble_configs(cfg, 4)]
    assert len(set(seeds)) == 4
    serial = run_ensemble(cfg, 4)
    parallel = run_ensemble(cfg, 4, workers=2)
    assert records_csv(serial) == records_csv(parallel)


# ---------------------------------------------------------------------------
# convergence diagnostics


def test_energy_window():
    assert energy_window(1.0, 0.5, 0.1, 20) == 4
    assert energy_window(1.0, 0.5, 0.1, 2) == 2
    assert energy_window(0.05, 0.5, 0.1, 20) == 0


def test_energy_decay_on_synthetic_runs():
    r = make_rng(3)
    runs = []
    for _ in range(40):
        e, recs = 1.0, []
        for t in range(8):
            recs.append(_rec(t, 0.5**t, ((2, e),)))
            e *= r.uniform(0.0, 0.8)  # mean retention 0.4 = 2/(3+2)
        runs.append(recs)
    est = energy_decay(runs, 2, 3, floor=1e-3)
    assert isinstance(est, EnergyDecay)
    assert est.exact == pytest.approx(0.4)
    assert est.window == energy_window(1.0, 0.4, 1e-3, 7)
    assert est.within()
    assert lowest_active_degree(runs, 4) == 2
    assert mean_width_drift(runs) == 0.0


# ---------------------------------------------------------------------------
# Steiner process


def test_steiner_config_validation():
    with pytest.raises(ValueError):
        SteinerRunConfig(n=4)
    with pytest.raises(ValueError):
        SteinerRunConfig(n=2, seed_body="cube")
    with pytest.raises(ValueError):
        SteinerRunConfig(eps=0.0)


def test_steiner_rectangle_run():
    run = run_steiner_process(SteinerRunConfig(n=2, seed_body="rectangle", seed=4))
    recs = run.records
    assert recs[-1].eps < 0.05
    assert recs[0].vol == pytest.approx(pi)
    assert max(abs(r.vol / recs[0].vol - 1) for r in recs) < 1e-8
    assert [r.count for r in recs] == list(range(len(recs)))
    facs = contraction_factors(run)
    assert len(facs) and np.median(facs) < 1


def test_steiner_disk_immediate():
    run = run_steiner_process(SteinerRunConfig(n=2, seed_body="disk"))
    assert len(run.records) == 1


def test_steiner_3d_abort_on_budget():
    cfg = SteinerRunConfig(n=3, seed_body="random", resolution=16, volume_budget=1e-6,
                           max_symmetrizations=3)
    with pytest.raises(NumericalAbort):
        run_steiner_process(cfg)


def test_steiner_3d_short_run():
    run = run_steiner_process(SteinerRunConfig(n=3, seed_body="cube", resolution=32,
                                               max_symmetrizations=3))
    recs = run.records
    assert len(recs) == 4
    assert max(abs(r.vol / recs[0].vol - 1) for r in recs) < 1e-9
    assert recs[-1].rout < recs[0].rout


# ---------------------------------------------------------------------------
# decay tables and reports


def test_decay_suite_rows(grids):
    table = run_decay_suite([3], [0, 1, 2], 500, make_rng(5), grids={3: grids[3]})
    k0, k1, k2 = table.rows
    assert k0.empirical == 1.0 and k0.exact == 1.0
    assert k1.empirical < 1e-20 and k1.dim_invariant == 0
    assert abs(k2.empirical - 0.4) < 3 * k2.stderr + 1e-3
    assert k2.bound == pytest.approx(2 / 3)
    (c,) = table.comparisons
    assert c.n == 50 and c.relative_gap < 0.05


def test_records_csv_layout():
    recs = [_rec(r, 0.5**r, ((2, 0.1), (4, 0.01))) for r in range(3)]
    text = records_csv(recs)
    lines = text.strip().split("\n")
    assert lines[0] == "round,count,eps,mstar,rin,rout,vol,E2,E4"
    assert len(lines) == 4
    assert lines[2].split(",")[2] == "0.5"
    ens = records_csv([recs, recs])
    assert ens.split("\n")[0].startswith("run,round")
    assert fmt(0.1) == "0.1" and fmt(np.float64(0.25)) == "0.25" and fmt(3) == "3"


def test_emit_report_deterministic(tmp_path):
    recs = [_rec(r, 0.5**r) for r in range(3)]
    a = emit_report(recs, tmp_path / "a" / "run")
    b = emit_report(recs, tmp_path / "b" / "run")
    for pa, pb in zip(a, b):
        assert pa.read_bytes() == pb.read_bytes()
    svg = a[1].read_text()
    assert svg.startswith("<svg") and "href" not in svg
    with pytest.raises(ValueError):
        emit_report([], tmp_path / "c" / "run")
    assert not (tmp_path / "c").exists() or not any((tmp_path / "c").iterdir())


def test_svg_plot_rejects_empty():
    with pytest.raises(ValueError):
        svg_plot([("x", [0, 1], [0.0, -1.0])])
