"""Verification suites: each returns a :class:`SuiteResult` with the raw
numbers behind its pass/fail decision."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import exp, pi, sqrt

import numpy as np

from . import constants as C
from .bodies.functionals import (bokowski_heil_residual, corollary14_check, small_cap_check,
                                 urysohn_check)
from .bodies.polygon import random_polygon, rectangle, regular_polygon
from .bodies.polytope import random_polytope3
from .bodies.support import Ball, Scaled
from .experiments.steiner import SteinerRunConfig, make_seed, _step
from .geometry import build_grid, derive_seed, make_rng, sample_haar_basis, sample_uniform_sphere
from . import harmonics as H


@dataclass
class SuiteResult:
    name: str
    passed: bool
    checks: int = 0
    failures: list = field(default_factory=list)
    detail: dict = field(default_factory=dict)

    def line(self) -> str:
        status = "pass" if self.passed else "fail"
        return f"suite={self.name} status={status} checks={self.checks} failures={len(self.failures)}"


class _Collector:
    def __init__(self, name):
        self.result = SuiteResult(name, True)

    def check(self, ok, label, **info):
        self.result.checks += 1
        if not ok:
            self.result.passed = False
            self.result.failures.append((label, info))
        return ok

    def done(self, **detail):
        self.result.detail.update(detail)
        return self.result


_GRIDS: dict = {}


def grid(n: int, resolution=None):
    key = (n, resolution)
    if key not in _GRIDS:
        _GRIDS[key] = build_grid(n, resolution)
    return _GRIDS[key]


# ---------------------------------------------------------------------------
# harmonic-analysis suites


def suite_dims(ns=range(2, 6), ks=range(0, 9), **_):
    c = _Collector("dims")
    rows = []
    for n in ns:
        for k in ks:
            nk, bf = H.dim_harmonic(n, k), H.brute_force_harmonic_dim(n, k)
            n0, bf0 = H.dim_invariant(n, k), H.brute_force_invariant_dim(n, k)
            c.check(nk == bf, "dim_harmonic", n=n, k=k, formula=nk, oracle=bf)
            c.check(n0 == bf0, "dim_invariant", n=n, k=k, formula=n0, oracle=bf0)
            if k % 2:
                c.check(n0 == 0, "odd invariant", n=n, k=k)
            rows.append((n, k, nk, bf, n0, bf0))
    return c.done(rows=rows)


def suite_lemma1(trials=2000, seed=C.DEFAULT_SEED, cases=((3, 2), (4, 4)), pairs=5, **_):
    c = _Collector("lemma1")
    rng = make_rng(seed)
    out = []
    for n, k in cases:
        for _ in range(pairs):
            x, y = sample_uniform_sphere(rng, n), sample_uniform_sphere(rng, n)
            est = H.verify_lemma1(n, k, x, y, trials, rng)
            c.check(est.within(3.0, 1e-12), "lemma1", n=n, k=k, est=est)
            out.append((n, k, est))
    return c.done(estimates=out)


def _lemma2_functions(rng, n, k):
    g = grid(n)
    fs = [H.zonal(n, k, sample_uniform_sphere(rng, n)),
          H.random_harmonic(rng, n, k, 6),
          lambda x: np.ones(len(x)),
          lambda x: x[:, 0] ** 2 + 0.5 * x[:, -1],
          lambda x: np.abs(x[:, 0])]
    return g, fs


def suite_lemma2(trials=1000, seed=C.DEFAULT_SEED, cases=((3, 2), (3, 1), (4, 2)), **_):
    c = _Collector("lemma2")
    rng = make_rng(seed)
    out = []
    for n, k in cases:
        g, fs = _lemma2_functions(rng, n, k)
        for f in fs:
            est = H.verify_lemma2(n, k, f, trials, rng, g)
            slack = 5 * g.tau * max(1.0, abs(est.reference))
            c.check(est.within(3.0, slack), "lemma2", n=n, k=k, est=est)
            out.append((n, k, est))
    return c.done(estimates=out)


def suite_lemma9(count=100, seed=C.DEFAULT_SEED, ns=(3, 4), ks=range(2, 7), **_):
    c = _Collector("lemma9")
    rng = make_rng(seed)
    worst = {}
    for n in ns:
        g = grid(n)
        for k in ks:
            extra = sample_uniform_sphere(rng, n, size=4096)
            ratio = 0.0
            for _ in range(count):
                h = H.random_harmonic(rng, n, k)
                ok, sup, bound = H.check_linfinity_bound(n, k, h, g, extra)
                c.check(ok, "sup bound", n=n, k=k, sup=sup, bound=bound)
                ratio = max(ratio, sup / bound)
            pole = sample_uniform_sphere(rng, n)
            z = H.zonal(n, k, pole)
            ok, sup, bound = H.check_linfinity_bound(n, k, z, g, pole[None])
            c.check(ok and sup >= 0.999 * bound, "zonal equality", n=n, k=k, sup=sup, bound=bound)
            worst[(n, k)] = ratio
    return c.done(worst_ratio=worst)


def suite_lemma10(c1=C.LEMMA10_C1, ns=range(3, 51), ks=range(2, 201, 2), epsilons=(0.5, 0.1, 0.01), **_):
    c = _Collector("lemma10")
    for n in ns:
        for k in ks:
            for e in epsilons:
                c.check(H.check_lemma10(n, k, e, c1), "lemma10", n=n, k=k, eps=e)
    return c.done(c1=c1)


def suite_lemma11(c2=C.LEMMA11_C2, ns=range(3, 51), ks=range(2, 201, 2), **_):
    c = _Collector("lemma11")
    for n in ns:
        for k in ks:
            c.check(H.check_lemma11(n, k, c2), "lemma11", n=n, k=k)
    return c.done(c2=c2)


PROP7_CASES = ((3, 2), (3, 4), (4, 2), (5, 2), (4, 4))


def suite_prop7(trials=2000, seed=C.DEFAULT_SEED, cases=PROP7_CASES, rel=0.05, **_):
    c = _Collector("prop7")
    rng = make_rng(seed)
    out = []
    for n, k in cases:
        r = H.verify_prop7(n, k, trials, rng, grid(n))
        c.check(r.within(3.0), "3 SE", n=n, k=k, result=r)
        c.check(abs(r.empirical - r.exact) <= rel * r.exact, "relative", n=n, k=k, result=r)
        c.check(r.exact < r.upper_bound, "bound", n=n, k=k)
        out.append((n, k, r))
    return c.done(results=out)


def suite_remark(trials=2000, seed=C.DEFAULT_SEED, cases=PROP7_CASES, **_):
    c = _Collector("remark")
    rng = make_rng(seed)
    out = []
    for n, k in cases:
        est = H.verify_remark_single_direction(n, k, trials, rng, grid(n))
        c.check(est.within(3.0), "single direction", n=n, k=k, est=est)
        out.append((n, k, est))
    value, limit = H.comparison_row(50, 2)
    c.check(abs(value - limit) <= 0.05 * limit, "comparison n=50", value=value, limit=limit)
    return c.done(estimates=out, comparison=(value, limit))


def _mixture(rng, n, degrees=(1, 2, 3, 4)):
    terms = []
    for k in degrees:
        for c, z in H.random_harmonic(rng, n, k, 4).terms:
            terms.append((c, z))
    return H.HarmonicMixture(tuple(terms))


def suite_cor8(trials=500, seed=C.DEFAULT_SEED, ns=(3, 4, 5), **_):
    c = _Collector("cor8")
    rng = make_rng(seed)
    out = []
    for n in ns:
        g = grid(n)
        f = _mixture(rng, n)
        vals = f(g.nodes)
        centred = lambda x, f=f, m=g.weights @ vals: f(x) - m
        est = H.verify_corollary8(n, centred, trials, rng, g)
        c.check(est.estimate <= est.reference + 3 * est.stderr, "sqrt(2/n)", n=n, est=est)
        odd = 0.0
        for k in (1, 3, 5):
            z = H.zonal(n, k, sample_uniform_sphere(rng, n))
            sym = H.orthogonal_symmetrize_function(z, sample_haar_basis(rng, n), g.nodes)
            odd = max(odd, float(np.abs(sym).max()))
        c.check(odd <= 1e-12, "odd vanish", n=n, max_abs=odd)
        out.append((n, est, odd))
    return c.done(results=out)


# ---------------------------------------------------------------------------
# convex-geometry suites


def _bodies_2d(rng, count):
    return [random_polygon(rng, int(rng.integers(3, 40))) for _ in range(count)]


def _bodies_3d(rng, count):
    return [random_polytope3(rng, int(rng.integers(4, 40))) for _ in range(count)]


def suite_thm13(seed=C.DEFAULT_SEED, polygons=200, polytopes=50, **_):
    c = _Collector("thm13")
    rng = make_rng(seed)
    worst = np.inf
    for body in _bodies_2d(rng, polygons) + _bodies_3d(rng, polytopes):
        r = bokowski_heil_residual(body)
        c.check(r.holds, "residual", n=body.dim, residual=r)
        worst = min(worst, r.value + r.tolerance)
    for n in (2, 3, 4):
        r = bokowski_heil_residual(Ball(n), grid(n))
        c.check(abs(r.value) <= max(r.tolerance, 1e-12), "ball equality", n=n, residual=r)
    sq = bokowski_heil_residual(rectangle(2.0, 2.0))
    c.check(abs(sq.value - (4 / pi + 6 - 16 * sqrt(2) / pi)) <= 1e-12, "square", residual=sq)
    return c.done(min_slack=worst)


def _normalized(rng, polygons, polytopes):
    out = [p.normalized_area() for p in _bodies_2d(rng, polygons)]
    out += [p.normalized_volume() for p in _bodies_3d(rng, polytopes)]
    return out


def suite_cor14(seed=C.DEFAULT_SEED, polygons=200, polytopes=50, **_):
    c = _Collector("cor14")
    rng = make_rng(seed)
    sharp = 0
    for body in _normalized(rng, polygons, polytopes) + [rectangle(2.0, 2.0).normalized_area()]:
        r = corollary14_check(body)
        c.check(r.holds, "main", n=body.dim, result=r)
        if r.sharp_holds is not None:
            sharp += 1
            c.check(r.sharp_holds, "sharp", n=body.dim, result=r)
    for n in (2, 3):
        r = corollary14_check(Ball(n), grid(n), eps=1e-6)
        c.check(bool(r), "ball limit", n=n, result=r)
    return c.done(sharp_cases=sharp)


def suite_urysohn(seed=C.DEFAULT_SEED, polygons=200, polytopes=50, **_):
    c = _Collector("urysohn")
    rng = make_rng(seed)
    lowest = np.inf
    for body in _normalized(rng, polygons, polytopes):
        r = urysohn_check(body)
        c.check(r.holds, "urysohn", n=body.dim, result=r)
        lowest = min(lowest, r.value)
    sq = urysohn_check(rectangle(2.0, 2.0).normalized_area())
    c.check(abs(sq.value - 2 / sqrt(pi)) <= 1e-12, "square", result=sq)
    c.check(urysohn_check(Ball(2)).holds and abs(urysohn_check(Ball(3)).value - 1) < 1e-12, "ball")
    return c.done(lowest_mstar=lowest)


def suite_lemma17(seed=C.DEFAULT_SEED, runs=10, **_):
    c = _Collector("lemma17")
    g2 = grid(2)
    for e in (0.1, 0.3, 0.9):
        r = small_cap_check(Ball(2), e, g2)
        c.check(r.applicable and r.holds, "ball", eps=e)
    r = small_cap_check(Ball(2, 1 + (0.3 / 30) ** 2), 0.3, g2)
    c.check(r.applicable and r.holds, "dilated ball")
    applicable = 0
    for i in range(runs):
        cfg = SteinerRunConfig(2, "random", eps=1e-4, seed=derive_seed(seed, i), max_symmetrizations=200)
        rng = make_rng(cfg.seed)
        body = make_seed(cfg, rng)
        vol0 = body.area()
        for _ in range(cfg.max_symmetrizations // 2):
            basis = sample_haar_basis(rng, 2)
            for j in range(2):
                body, _ = _step(body, basis[:, j], cfg, vol0)
            eps_cap = (max(body.circumradius() - 1, 0.0)) ** 0.5 / C.SMALL_CAP_C7
            if 0 < eps_cap < 1:
                res = small_cap_check(body, eps_cap * (1 + 1e-9), g2)
                if res.applicable:
                    applicable += 1
                    c.check(res.holds, "steiner body", run=i, result=res)
            if body.circumradius() - 1 < 1e-6:
                break
    c.check(applicable > 0, "preconditions reached")
    return c.done(applicable=applicable)


SUITES = {
    "dims": suite_dims,
    "lemma6": suite_dims,
    "lemma1": suite_lemma1,
    "lemma2": suite_lemma2,
    "lemma9": suite_lemma9,
    "lemma10": suite_lemma10,
    "lemma11": suite_lemma11,
    "prop7": suite_prop7,
    "cor8": suite_cor8,
    "remark": suite_remark,
    "thm13": suite_thm13,
    "cor14": suite_cor14,
    "urysohn": suite_urysohn,
    "lemma17": suite_lemma17,
}


def run_suite(name: str, **params) -> list:
    """Run one suite (or ``"all"``); returns a list of results."""
    if name == "all":
        return [fn(**params) for key, fn in SUITES.items() if key != "lemma6"]
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(list(SUITES) + ['all'])}")
    return [SUITES[name](**params)]
