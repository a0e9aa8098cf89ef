"""Command-line front end.

    python -m convsym <subcommand> [flags] [key=value ...]

Parameters come from ``--config <file>`` (``key=value`` lines, ``#``
comments), then ``key=value`` arguments, then flags; later sources win.
Exit codes: 0 success, 2 configuration error, 3 numerical abort.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import constants as C
from .experiments.decay import run_decay_suite
from .experiments.fitting import fit_rate
from .experiments.minkowski import BASIS_MODES, MinkowskiRunConfig, grid_for, run_ensemble
from .experiments.records import RunRecord
from .experiments.report import _atomic_write, emit_report, fmt, svg_plot
from .experiments.steiner import (STEINER_SEEDS, NumericalAbort, SteinerRunConfig,
                                  contraction_factors, run_steiner_process)
from .geometry import derive_seed, make_rng
from .harmonics import dim_harmonic, dim_invariant, exact_ratio, ratio_upper_bound

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3

log = logging.getLogger("convsym")


class ConfigError(ValueError):
    pass


# valid keys per subcommand (flags map onto the same names)
KEYS = {
    "dims": {"n", "k"},
    "decay": {"n", "k", "trials"},
    "minkowski": {"n", "body", "rounds", "eps", "grid", "runs", "kmax", "basis", "workers", "stop"},
    "steiner": {"n", "body", "rounds", "eps", "grid", "runs", "vertices", "aspect", "budget"},
    "verify": {"suite", "trials", "c1", "c2"},
    "report": {"input", "eps", "floor", "n"},
}
COMMON = {"seed", "out", "verbosity"}
HELP = {
    "dims": "dimension table of harmonic spaces and their invariant subspaces",
    "decay": "Monte Carlo energy-decay table for symmetrized harmonics",
    "minkowski": "randomized orthogonal-symmetrization runs",
    "steiner": "randomized Steiner-symmetrization runs (n = 2 exact, n = 3 sampled)",
    "verify": "run verification suites",
    "report": "plot a run-record CSV and fit its decay rate",
}
REQUIRED = {"minkowski": {"n"}, "steiner": {"n"}, "report": {"input"}, "verify": {"suite"}}


@dataclass
class CliConfig:
    subcommand: str
    params: dict = field(default_factory=dict)
    out: Path = Path("out")
    seed: int = C.DEFAULT_SEED
    verbosity: int = 0

    def get(self, key, default=None):
        return self.params.get(key, default)

    def prefix(self, tag: str | None = None) -> Path:
        name = f"{self.subcommand}_seed{self.seed}" + (f"_{tag}" if tag else "")
        return self.out / name


# ---------------------------------------------------------------------------
# parameter parsing


def parse_kv(items, source="argument") -> dict:
    out = {}
    for item in items:
        if "=" not in item:
            raise ConfigError(f"expected key=value, got {item!r} ({source})")
        k, v = item.split("=", 1)
        k = k.strip()
        if not k:
            raise ConfigError(f"empty key in {item!r} ({source})")
        out[k] = v.strip()
    return out


def read_config(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    return parse_kv([ln for ln in lines if ln], source=str(path))


def int_range(text: str) -> list:
    """``3``, ``2..5`` (inclusive), ``2,4,6`` or ``0..8:2`` (step)."""
    text = str(text).strip()
    try:
        if ".." in text:
            lo, rest = text.split("..", 1)
            hi, _, step = rest.partition(":")
            vals = list(range(int(lo), int(hi) + 1, int(step) if step else 1))
        else:
            vals = [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"invalid integer range {text!r}") from exc
    if not vals:
        raise ConfigError(f"empty range {text!r}")
    return vals


def float_list(text: str) -> tuple:
    try:
        return tuple(float(v) for v in str(text).split(",") if v.strip())
    except ValueError as exc:
        raise ConfigError(f"invalid number list {text!r}") from exc


def _int(cfg, key, default=None):
    v = cfg.get(key, default)
    if v is None:
        return None
    try:
        return int(v)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{key} must be an integer, got {v!r}") from exc


def _float(cfg, key, default=None):
    v = cfg.get(key, default)
    if v is None:
        return None
    try:
        return float(v)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{key} must be a number, got {v!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="convsym", description="Symmetrization experiments on convex bodies.")
    sub = p.add_subparsers(dest="subcommand", required=True)
    for name in KEYS:
        keys = ", ".join(sorted(KEYS[name] | COMMON))
        s = sub.add_parser(name, help=HELP[name],
                           description=f"{HELP[name]}. Extra key=value parameters: {keys}.")
        if name == "verify":
            s.add_argument("suite", nargs="?", help="suite name or 'all'")
        s.add_argument("--n")
        s.add_argument("--k")
        s.add_argument("--seed")
        s.add_argument("--rounds")
        s.add_argument("--eps")
        s.add_argument("--grid")
        s.add_argument("--trials")
        s.add_argument("--out")
        s.add_argument("--config")
        s.add_argument("-v", "--verbose", action="count", default=0)
    return p


def parse_args(parser, argv):
    """Flags anywhere; every leftover ``key=value`` item becomes a parameter."""
    args, extra = parser.parse_known_args(argv)
    params = []
    if getattr(args, "suite", None) and "=" in args.suite:
        params.append(args.suite)
        args.suite = None
    for item in extra:
        if item.startswith("-") or "=" not in item:
            parser.error(f"unrecognized argument {item!r}")
        params.append(item)
    args.params = params
    return args


def make_config(args) -> CliConfig:
    params = {}
    if args.config:
        params.update(read_config(args.config))
    params.update(parse_kv(args.params))
    for key in ("n", "k", "seed", "rounds", "eps", "grid", "trials", "out"):
        v = getattr(args, key, None)
        if v is not None:
            params[key] = v
    if getattr(args, "suite", None):
        params["suite"] = args.suite
    valid = KEYS[args.subcommand] | COMMON
    unknown = sorted(set(params) - valid)
    if unknown:
        raise ConfigError(f"unknown key(s) {', '.join(unknown)} for '{args.subcommand}'; "
                          f"valid keys: {', '.join(sorted(valid))}")
    missing = sorted(REQUIRED.get(args.subcommand, set()) - set(params))
    if missing:
        raise ConfigError(f"missing required key(s) {', '.join(missing)} for '{args.subcommand}'")
    cfg = CliConfig(args.subcommand, params)
    cfg.seed = _int(cfg, "seed", C.DEFAULT_SEED)
    cfg.out = Path(params.get("out", "out"))
    cfg.verbosity = max(_int(cfg, "verbosity", 0), args.verbose)
    return cfg


# ---------------------------------------------------------------------------
# subcommands


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) for v in r])
    return buf.getvalue()


def cmd_dims(cfg: CliConfig, stdout) -> int:
    ns = int_range(cfg.get("n", "2..5"))
    ks = int_range(cfg.get("k", "0..8"))
    if min(ns) < 2 or min(ks) < 0:
        raise ConfigError("need n >= 2 and k >= 0")
    rows = []
    for n in ns:
        for k in ks:
            nk, n0 = dim_harmonic(n, k), dim_invariant(n, k)
            bound = "" if k == 0 else ratio_upper_bound(n, k)
            rows.append((n, k, nk, n0, exact_ratio(n, k), bound))
    header = ("n", "k", "N_k", "N0_k", "ratio", "bound")
    print(f"{'n':>3} {'k':>3} {'N_k':>10} {'N0_k':>10} {'ratio':>10} {'bound':>10}", file=stdout)
    for n, k, nk, n0, r, b in rows:
        bs = "—" if b == "" else f"{b:.4f}"
        print(f"{n:>3} {k:>3} {nk:>10} {n0:>10} {r:>10.4g} {bs:>10}", file=stdout)
    path = cfg.prefix().with_suffix(".csv")
    _atomic_write(path, _csv_text(header, rows))
    print(f"wrote {path}", file=stdout)
    return EXIT_OK


def cmd_decay(cfg: CliConfig, stdout) -> int:
    ns = int_range(cfg.get("n", "3,4"))
    ks = int_range(cfg.get("k", "0,2,4"))
    trials = _int(cfg, "trials", 1000)
    if trials < 500:
        raise ConfigError("trials must be >= 500")
    if min(ns) < 2 or max(ns) > C.EXACT_SIGN_MAX_DIM:
        raise ConfigError(f"n must lie in 2..{C.EXACT_SIGN_MAX_DIM}")
    table = run_decay_suite(ns, ks, trials, make_rng(cfg.seed))
    for r in table.rows:
        print(f"n={r.n} k={r.k} empirical={r.empirical:.4f}±{r.stderr:.4f} exact={r.exact:.4f} "
              f"single={r.single_empirical:.4f}±{r.single_stderr:.4f} single_exact={r.single_exact:.4f}",
              file=stdout)
    for c in table.comparisons:
        print(f"comparison n={c.n} (n/(n+2))^n={c.value:.4f} e^-2={c.limit:.4f} gap={c.relative_gap:.2%}",
              file=stdout)
    for p in emit_report(table, cfg.prefix()):
        print(f"wrote {p}", file=stdout)
    return EXIT_OK


def cmd_minkowski(cfg: CliConfig, stdout) -> int:
    eps = float_list(cfg.get("eps", "0.1,0.01,0.001"))
    body = cfg.get("body", "cube")
    # a segment along a coordinate axis is fixed by coordinate sign flips
    basis = cfg.get("basis", "diagonal" if body == "segment" else "haar")
    if basis not in BASIS_MODES:
        raise ConfigError(f"basis must be one of {BASIS_MODES}")
    try:
        mcfg = MinkowskiRunConfig(
            n=_int(cfg, "n"), seed_body=body, rounds=_int(cfg, "rounds", 40),
            resolution=_int(cfg, "grid"), seed=cfg.seed, epsilons=eps, kmax=_int(cfg, "kmax", 4),
            basis_mode=basis, stop_at_target=cfg.get("stop", "1") not in ("0", "false", "no"))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    runs = _int(cfg, "runs", 1)
    if runs < 1:
        raise ConfigError("runs must be >= 1")
    grid = grid_for(mcfg)
    results = run_ensemble(mcfg, runs, workers=_int(cfg, "workers", 1))
    for i, recs in enumerate(results):
        last = recs[-1]
        print(f"run={i} rounds={last.round} count={last.count} eps={last.eps:.3e} "
              f"mstar={last.mstar:.6f}", file=stdout)
    paths = emit_report(results if runs > 1 else results[0], cfg.prefix())
    if max(len(r) for r in results) >= 5:
        fit = fit_rate(results, eps, floor=10 * grid.tau, n=mcfg.n, tau=grid.tau)
        print(f"fit status={fit.status} rho={fit.rho:.4f} ci=({fit.rho_ci[0]:.4f},{fit.rho_ci[1]:.4f}) "
              f"slope={fit.slope:.3f} r2={fit.r_squared:.3f} tau_grid={grid.tau:.2e}", file=stdout)
    for p in paths:
        print(f"wrote {p}", file=stdout)
    return EXIT_OK


def cmd_steiner(cfg: CliConfig, stdout) -> int:
    n = _int(cfg, "n")
    body = cfg.get("body", "rectangle" if n == 2 else "cube")
    try:
        scfg_base = dict(n=n, seed_body=body, eps=_float(cfg, "eps", 0.05),
                         max_symmetrizations=_int(cfg, "rounds", 400),
                         resolution=_int(cfg, "grid", 64), max_vertices=_int(cfg, "vertices", 2048),
                         aspect=_float(cfg, "aspect", 4.0),
                         volume_budget=_float(cfg, "budget", 0.02))
        SteinerRunConfig(seed=cfg.seed, **scfg_base)
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc
    runs = _int(cfg, "runs", 1)
    if runs < 1:
        raise ConfigError("runs must be >= 1")
    results = []
    for i in range(runs):
        run = run_steiner_process(SteinerRunConfig(seed=derive_seed(cfg.seed, i), **scfg_base))
        results.append(run)
        last = run.records[-1]
        facs = contraction_factors(run)
        med = float(np.median(facs)) if len(facs) else float("nan")
        vols = np.array([r.vol for r in run.records])
        print(f"run={i} count={last.count} eps={last.eps:.3e} rout={last.rout:.6f} "
              f"phase_switch={run.phase_switch} median_contraction={med:.4f} "
              f"vol_drift={np.abs(vols / vols[0] - 1).max():.2e} cap_checks={run.cap_checks} "
              f"cap_passes={run.cap_passes}", file=stdout)
    data = [r.records for r in results] if runs > 1 else results[0].records
    for p in emit_report(data, cfg.prefix()):
        print(f"wrote {p}", file=stdout)
    return EXIT_OK


def cmd_verify(cfg: CliConfig, stdout) -> int:
    from .verify import SUITES, run_suite

    name = cfg.get("suite")
    if name != "all" and name not in SUITES:
        raise ConfigError(f"unknown suite {name!r}; choose from {', '.join(list(SUITES) + ['all'])}")
    params = {"seed": cfg.seed}
    if "trials" in cfg.params:
        params["trials"] = _int(cfg, "trials")
    if "c1" in cfg.params:
        params["c1"] = _float(cfg, "c1")
    if "c2" in cfg.params:
        params["c2"] = _float(cfg, "c2")
    results = run_suite(name, **params)
    for r in results:
        print(r.line(), file=stdout)
        for label, info in r.failures[: 3 if cfg.verbosity == 0 else None]:
            print(f"  failed {label}: {info}", file=stdout)
    return EXIT_OK if all(r.passed for r in results) else 1


def _read_records(path) -> list:
    try:
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    if not rows or "eps" not in rows[0]:
        raise ConfigError(f"{path} is not a run-record CSV")
    runs: dict = {}
    for row in rows:
        energies = tuple((int(k[1:]), float(v)) for k, v in row.items() if k.startswith("E"))
        rec = RunRecord(int(row["round"]), int(row["count"]), float(row["eps"]), float(row["mstar"]),
                        float(row["rin"]), float(row["rout"]), float(row["vol"]), energies)
        runs.setdefault(int(row.get("run", 0)), []).append(rec)
    return [runs[k] for k in sorted(runs)]


def cmd_report(cfg: CliConfig, stdout) -> int:
    runs = _read_records(cfg.get("input"))
    eps = float_list(cfg.get("eps", "0.1,0.01,0.001"))
    floor = _float(cfg, "floor", 0.0)
    series = [(f"run {i}", [r.count for r in run], [r.eps for r in run]) for i, run in enumerate(runs)]
    stem = Path(cfg.get("input")).stem
    path = cfg.out / f"report_seed{cfg.seed}_{stem}.svg"
    _atomic_write(path, svg_plot(series, f"eps_distance: {stem}"))
    if max(len(r) for r in runs) >= 5:
        fit = fit_rate(runs, eps, floor=floor, n=_int(cfg, "n", 1))
        print(f"fit status={fit.status} rho={fit.rho:.4f} slope={fit.slope:.3f} r2={fit.r_squared:.3f}",
              file=stdout)
        for e, r in fit.rounds_to_eps.items():
            print(f"rounds_to_eps eps={e:g} median_round={r:.3f}", file=stdout)
    print(f"wrote {path}", file=stdout)
    return EXIT_OK


COMMANDS = {"dims": cmd_dims, "decay": cmd_decay, "minkowski": cmd_minkowski,
            "steiner": cmd_steiner, "verify": cmd_verify, "report": cmd_report}


def main(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parse_args(parser, argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        cfg = make_config(args)
        logging.basicConfig(level=logging.WARNING - 10 * min(cfg.verbosity, 2),
                            format="%(levelname)s %(name)s: %(message)s")
        return COMMANDS[cfg.subcommand](cfg, stdout)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalAbort, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numerical abort: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"output error: {exc}", file=sys.stderr)
        return EXIT_CONFIG



def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
