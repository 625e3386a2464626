"""The ten acceptance criteria as seeded, self-contained checks.

Each ``criterion_k(seed)`` returns a Report whose metrics are deterministic
functions of the seed; timing is measured by the caller so reports stay
byte-identical across runs. Criterion 10 (CLI determinism) needs two
processes and lives with the CLI tests.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from . import apps, grv
from .core import (LinFunc, PopaCtx, circle, circle_rows, eta, eta_rows, inverse, inverse_rows,
                   is_member, random_members, random_rational_functional, random_rational_members,
                   rel_dev)
from .homs import (FAMILIES, an_closed, an_sequence, classify_hom,
                   extract_gamma, hom_residual, literal_4b_map, null_gamma, radial_lambda,
                   random_spec, residual_sweep)
from .radial import sum_witness
from .report import Report
from .scalar_homs import ALL_PARAMS, ZERO, BoMap, bo_cell_continuity, bo_hom_residual, fin, sample_domain


def _child(seed: int, tag: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, tag]))


def _report(name: str, checks: dict[str, bool], metrics: dict, seed: int) -> Report:
    failures = [k for k, ok in checks.items() if not ok]
    return Report(name, not failures, {**metrics, "checks": checks}, failures, seed)


# 1 ---------------------------------------------------------------------------------

def criterion_1(seed: int, n_exact: int = 1000, n_float: int = 10_000, tol: float = 1e-12) -> Report:
    """Group laws: exact on rational triples, 1e-12 relative in float64."""
    checks, metrics = {}, {}
    for d in (1, 2, 5):
        rng = _child(seed, 100 + d)
        ctx = PopaCtx.make(random_rational_functional(d, rng), exact=True)
        pts = random_rational_members(ctx, 3 * n_exact, rng)
        zero = ctx.zero()
        bad = {"assoc": 0, "identity": 0, "inverse": 0, "closure": 0, "eta_mult": 0}
        for i in range(n_exact):
            x, y, z = pts[3 * i:3 * i + 3]
            xy = circle(ctx, x, y)
            bad["closure"] += not is_member(ctx, xy)
            bad["assoc"] += not np.array_equal(circle(ctx, xy, z), circle(ctx, x, circle(ctx, y, z)))
            bad["identity"] += not (np.array_equal(circle(ctx, x, zero), x) and np.array_equal(circle(ctx, zero, x), x))
            xi = inverse(ctx, x)
            bad["inverse"] += not (np.array_equal(circle(ctx, x, xi), zero) and np.array_equal(circle(ctx, xi, x), zero))
            bad["eta_mult"] += eta(ctx, xy) != eta(ctx, x) * eta(ctx, y)
        metrics[f"exact_d{d}_violations"] = bad
        checks[f"exact_d{d}"] = not any(bad.values())

        fctx = PopaCtx.make(rng.standard_normal(d))
        X, Y, Z = (random_members(fctx, n_float, rng) for _ in range(3))
        XY = circle_rows(fctx, X, Y)
        devs = {
            "assoc": rel_dev(circle_rows(fctx, XY, Z), circle_rows(fctx, X, circle_rows(fctx, Y, Z))),
            "identity": max(rel_dev(circle_rows(fctx, X, 0 * X), X), rel_dev(circle_rows(fctx, 0 * X, X), X)),
            "inverse": max(rel_dev(circle_rows(fctx, X, inverse_rows(fctx, X)), 0 * X),
                           rel_dev(circle_rows(fctx, inverse_rows(fctx, X), X), 0 * X)),
            "eta_mult": rel_dev(eta_rows(fctx, XY), eta_rows(fctx, X) * eta_rows(fctx, Y)),
        }
        closure = bool(np.all(eta_rows(fctx, XY) > fctx.eps_mem))
        metrics[f"float_d{d}_max_rel_dev"] = devs
        checks[f"float_d{d}"] = closure and max(devs.values()) <= tol
    return _report("criterion_1_group_laws", checks, metrics, seed)


# 2 ---------------------------------------------------------------------------------

KAPPAS = (-2.0, -0.5, 0.5, 1.0, 2.0)


def criterion_2(seed: int, n_pairs: int = 1000, tol: float = 1e-10, cont_tol: float = 1e-6) -> Report:
    """All nine scalar cells are homomorphisms; cells are continuous as sigma -> 0."""
    checks, metrics = {}, {}
    worst = 0.0
    for i, rho in enumerate(ALL_PARAMS):
        rng = _child(seed, 200 + i)
        s, t = sample_domain(rho, n_pairs, rng, 1.0), sample_domain(rho, n_pairs, rng, 1.0)
        pairs = list(zip(s.tolist(), t.tolist()))
        for sigma in ALL_PARAMS:
            for k in KAPPAS:
                rep = bo_hom_residual(BoMap(rho, sigma, k), pairs, tol)
                worst = max(worst, rep.metrics["max_residual"])
                checks[f"{rho}->{sigma} k={k:g}"] = rep.passed
    metrics["max_hom_residual"] = worst
    cont = 0.0
    for rho in ALL_PARAMS:
        for t in sample_domain(rho, 25, _child(seed, 210), 1.0):
            for k in KAPPAS:
                cont = max(cont, bo_cell_continuity(rho, float(t), k, 1e-8))
    metrics["max_continuity_dev"] = cont
    checks["continuity"] = cont <= cont_tol
    # the same limit in the source parameter, relative to the cell value
    src = 0.0
    for t in np.linspace(-0.5, 2.0, 26):
        for k in KAPPAS:
            for sigma in ALL_PARAMS:
                a = BoMap(fin(1e-8), sigma, k)(float(t))
                b = BoMap(ZERO, sigma, k)(float(t))
                src = max(src, abs(a - b) / max(1.0, abs(b)))
    metrics["max_source_continuity_dev"] = src
    checks["source_continuity"] = src <= cont_tol
    return _report("criterion_2_bo_table", checks, metrics, seed)


# 3 ---------------------------------------------------------------------------------

def _witness_instance(ctx: PopaCtx, rng) -> tuple[np.ndarray, np.ndarray]:
    """Rational u (member) and v with u + v a member and v or -v a member."""
    while True:
        u, v = random_rational_members(ctx, 1, rng)[0], random_rational_members(ctx, 1, rng)[0]
        if rng.random() < 0.5:
            v = -v
        if is_member(ctx, u + v) and (is_member(ctx, v) or is_member(ctx, -v)):
            return u, v


def criterion_3(seed: int, n: int = 1000) -> Report:
    """Sum witnesses reproduce u + v exactly on rational data."""
    rng = _child(seed, 300)
    counts = {"case1": 0, "case2": 0}
    failures = 0
    for i in range(n):
        d = (1, 2, 3)[i % 3]
        ctx = PopaCtx.make(random_rational_functional(d, rng), exact=True)
        if ctx.rho.is_zero():
            ctx = PopaCtx.make([1] + [0] * (d - 1), exact=True)
        u, v = _witness_instance(ctx, rng)
        w = sum_witness(ctx, u, v)
        counts[w.case_tag] += 1
        ok = np.array_equal(w.evaluate(ctx), u + v) and w.letters_on_halflines(ctx)
        failures += not ok
    ctx = PopaCtx.make([1, 0], exact=True)
    fw = sum_witness(ctx, ctx.point([4, 0]), ctx.point([-3, 0]))
    fixed_ok = (fw.case_tag == "case2" and fw.delta == Fraction(4, 5)
                and np.array_equal(fw.word[1].element, ctx.point(["-3/5", 0]))
                and np.array_equal(fw.evaluate(ctx), ctx.point([1, 0])))
    checks = {"random_exact": failures == 0, "both_cases_seen": min(counts.values()) > 0, "fixed_case2": fixed_ok}
    return _report("criterion_3_witnesses", checks,
                   {"instances": n, "case_counts": counts, "failures": failures,
                    "fixed_letter": fw.word[1].element, "fixed_delta": fw.delta}, seed)


# 4 ---------------------------------------------------------------------------------

def probe_4b() -> dict:
    """Literal mixed 4B formula with rho != 0, kappa_w != 0, gamma = 1."""
    r = LinFunc([1.0, 0.0])
    u, w = np.array([1.0, 0.0]), np.array([0.0, 1.0])
    Ku, Kw = np.array([1.0, 1.0]), np.array([1.0, 0.0])
    K = literal_4b_map(r, r, u, w, Ku, Kw)
    rep = hom_residual(K, PopaCtx(r), PopaCtx(r), [(w + u, w)], tol=1e-9)
    return {"max_abs": rep.metrics["max_abs"], "units_of_Kw": rep.metrics["max_abs"] / float(np.linalg.norm(Kw)),
            "max_scaled": rep.metrics["max_scaled"]}


def _param_dev(a: dict, b: dict) -> float:
    if set(a) != set(b):
        return math.inf
    return max([float(np.max(np.abs(np.asarray(a[k], dtype=float) - np.asarray(b[k], dtype=float)))) for k in a],
               default=0.0)


def criterion_4(seed: int, n_pairs: int = 10_000, tol: float = 1e-9, n_round: int = 20) -> Report:
    """Constructed families are homomorphisms; the literal mixed form is not; classify round-trips."""
    checks, metrics = {}, {}
    worst = 0.0
    rng = _child(seed, 400)
    for fam in FAMILIES:
        for d in (1, 2, 6):
            spec = random_spec(fam, d, max(d, 2) if fam == "log" else d, rng)
            rep = residual_sweep(spec, spec.ctx_x, spec.ctx_y, n_pairs, seed=seed + d, tol=tol)
            worst = max(worst, rep.metrics["max_scaled"])
            checks[f"sweep_{fam}_d{d}"] = rep.passed
    metrics["max_sweep_residual"] = worst
    probe = probe_4b()
    metrics["probe_4b"] = probe
    checks["probe_4b"] = probe["units_of_Kw"] >= 0.1
    fams = list(FAMILIES)
    dev_max = 0.0
    for i in range(n_round):
        fam = fams[i % len(fams)]
        dx, dy = int(rng.integers(1, 5)), int(rng.integers(2 if fam == "log" else 1, 5))
        spec = random_spec(fam, dx, dy, rng)
        got = classify_hom(lambda x, s=spec: s.raw(x), spec.ctx_x, spec.ctx_y, seed=seed + i)
        dev = _param_dev(got.params, spec.params())
        dev_max = max(dev_max, dev)
        checks[f"roundtrip_{i}_{fam}"] = got.family == fam and dev <= 1e-6
    metrics["max_roundtrip_dev"] = dev_max
    return _report("criterion_4_homomorphisms", checks, metrics, seed)


# 5 ---------------------------------------------------------------------------------

def _null_direction(rho: LinFunc, rng) -> np.ndarray:
    c = rho.coeffs
    z = rng.standard_normal(c.size)
    if np.any(c):
        z -= (z @ c) / (c @ c) * c
    return z


def criterion_5(seed: int, n_max: int = 20, tol: float = 1e-9, specs_per_family: int = 4) -> Report:
    """K(n u) = a_n(tau) K(u) along null directions; a_n recursion versus closed form."""
    rng = _child(seed, 500)
    worst = 0.0
    checks = {}
    for fam in ("power", "linear", "exp"):
        for j in range(specs_per_family):
            spec = random_spec(fam, 3, 2, rng)
            u = _null_direction(spec.rho, rng)
            if fam == "exp":
                u *= 0.5 / max(abs(float(spec.kap(u))), 1e-12)
            Ku = spec.raw(u)
            tau = float(spec.sigma(Ku))
            a = an_sequence(tau, n_max)
            dev = max(rel_dev(spec.raw(n * u), a[n - 1] * Ku) for n in range(1, n_max + 1))
            worst = max(worst, dev)
            checks[f"{fam}_{j}"] = dev <= tol
    closed = {}
    for tau, expect in ((0.0, lambda n: n), (1.0, lambda n: 2 ** n - 1), (2.0, lambda n: (3 ** n - 1) / 2)):
        seq = an_sequence(tau, n_max)
        dev = max(max(abs(seq[n - 1] - an_closed(tau, n)), abs(seq[n - 1] - expect(n))) / max(1.0, abs(seq[n - 1]))
                  for n in range(1, n_max + 1))
        closed[f"tau={tau:g}"] = dev
        checks[f"closed_tau{tau:g}"] = dev <= 1e-12
    return _report("criterion_5_an_oracle", checks, {"max_orbit_dev": worst, "closed_form_dev": closed}, seed)


# 6 ---------------------------------------------------------------------------------

def criterion_6(seed: int, n_pairs: int = 1000, tol: float = 1e-9) -> Report:
    """gamma(a o b) = gamma(a) + gamma(b) and the lambda_u group law."""
    rng = _child(seed, 600)
    g_worst = 0.0
    for j in range(4):
        spec = random_spec("power", 3, 2, rng)
        A = random_members(spec.ctx_x, n_pairs // 4, rng, 1.0)
        B = random_members(spec.ctx_x, n_pairs // 4, rng, 1.0)
        for a, b in zip(A, B):
            ab = circle(spec.ctx_x, a, b)
            lhs = extract_gamma(spec.raw, spec.ctx_x, spec.ctx_y, ab)
            rhs = extract_gamma(spec.raw, spec.ctx_x, spec.ctx_y, a) + extract_gamma(spec.raw, spec.ctx_x, spec.ctx_y, b)
            g_worst = max(g_worst, abs(lhs - rhs))
    l_worst = n_worst = 0.0
    for j in range(4):
        spec = random_spec("exp", 3, 2, rng)
        u = _null_direction(spec.rho, rng)
        u *= 0.5 / max(abs(float(spec.kap(u))), 1e-12)
        tau = float(spec.sigma(spec.raw(u)))
        xs = rng.uniform(-2, 2, size=(n_pairs // 4, 2))
        for xi, et in xs:
            lam = lambda s: radial_lambda(spec.raw, spec.ctx_x, spec.ctx_y, u, s)
            lx, le = lam(xi), lam(et)
            l_worst = max(l_worst, abs(lam(xi + et) - (lx + le + lx * le * tau)) / max(1.0, abs(lam(xi + et))))
            p, q = xi * u, et * rng.standard_normal(3)
            lhs = null_gamma(spec.raw, spec.ctx_x, spec.ctx_y, p + q)
            n_worst = max(n_worst, abs(lhs - null_gamma(spec.raw, spec.ctx_x, spec.ctx_y, p)
                                       - null_gamma(spec.raw, spec.ctx_x, spec.ctx_y, q)))
    checks = {"gamma_additive": g_worst <= tol, "lambda_group_law": l_worst <= tol, "null_index_additive": n_worst <= tol}
    return _report("criterion_6_index_laws", checks,
                   {"gamma_dev": g_worst, "lambda_dev": l_worst, "null_index_dev": n_worst}, seed)


# 7 ---------------------------------------------------------------------------------

def criterion_7(seed: int, n_pairs: int = 100, tol: float = 1e-4, gfe_tol: float = 5e-4) -> Report:
    """GRV kernel estimates against analytic kernels, and their Goldie residuals."""
    checks, metrics = {}, {}
    cases = [("log", grv.builtin("log"), [1.0]), ("exp", grv.builtin("exp"), [1.0]),
             ("dehaan", grv.dehaan_problem(0.5), [1.0, 2.0, 4.0])]
    for name, p, xs in cases:
        errs = []
        for x in xs:
            est = grv.grv_kernel(p, x)
            errs.append(abs(est.value - p.K_exact(np.array([x]))))
        metrics[f"{name}_abs_err"] = max(errs)
        checks[f"{name}_kernel"] = max(errs) <= tol
    rng = _child(seed, 700)
    for name in ("log", "exp", "dehaan", "shiftlog"):
        p = grv.builtin(name)
        K, g, et = grv.estimated_triplet(p)
        samples = rng.uniform(0.1, 2.0, size=(n_pairs, 2))
        rep = grv.gfe_residual(K, g, et, [(np.array([a]), np.array([b])) for a, b in samples], gfe_tol)
        metrics[f"{name}_gfe"] = max(rep.metrics["gfe"], rep.metrics["gfe_mult"])
        checks[f"{name}_gfe"] = rep.passed
    return _report("criterion_7_grv", checks, metrics, seed)


# 8 ---------------------------------------------------------------------------------

EVT_CLOSED = ((1.0, 1.0), (1.0, 0.0), (2.0, -1.0), (2.0, 0.5), (-0.7, 0.3))


def criterion_8(seed: int, n_pairs: int = 1000) -> Report:
    """Goldie identity, GEV values and shape, and the noiseless fit."""
    rng = _child(seed, 800)
    checks, metrics = {}, {}
    worst = 0.0
    for k, g in EVT_CLOSED:
        pairs = np.exp(rng.uniform(-0.7, 0.7, size=(n_pairs, 2)))
        rep = apps.evt_goldie_residual(apps.EvtParams(k, g), pairs.tolist(), 1e-12)
        worst = max(worst, rep.metrics["max_residual"])
        checks[f"goldie k={k:g} g={g:g}"] = rep.passed
    metrics["max_goldie"] = worst
    v = apps.gev_cdf(0.0, 0.0)
    metrics["gev_0_0"] = v
    checks["gev_0_0"] = abs(v - math.exp(-1.0)) <= 1e-12
    mono = True
    for g in (-1.0, -0.1, 0.0, 0.1, 1.0):
        vals = np.array([apps.gev_cdf(g, x) for x in np.linspace(-20, 20, 1000)])
        mono &= bool(np.all(np.diff(vals) >= 0) and vals.min() >= 0 and vals.max() <= 1)
    checks["gev_monotone"] = mono
    tails = apps.gev_cdf(1.0, -1.0) == 0.0 and apps.gev_cdf(-1.0, 1.0) == 1.0 and apps.gev_cdf(1.0, -2.0) == 0.0
    checks["gev_tails"] = tails
    cont = max(abs(apps.gev_cdf(s, x) - apps.gev_cdf(0.0, x)) for s in (1e-6, -1e-6) for x in np.linspace(-5, 5, 201))
    metrics["gev_gamma_continuity"] = cont
    checks["gev_gamma_continuity"] = cont <= 1e-5
    ts = np.arange(1, 11, dtype=float)
    fit = apps.fit_E([(t, apps.evt_E(apps.EvtParams(2.0, 0.5), t)) for t in ts])
    metrics["fit"] = {"kappa": fit.params.kappa, "gamma": fit.params.gamma, "rmse": fit.residual}
    checks["fit"] = abs(fit.params.kappa - 2.0) <= 1e-3 and abs(fit.params.gamma - 0.5) <= 1e-3
    return _report("criterion_8_evt", checks, metrics, seed)


# 9 ---------------------------------------------------------------------------------

HAAR_RHO = (1.0, 0.5, -0.25)
HAAR_SHIFT = (0.4, -0.3, 0.2)
WRONG_SIDE_RHO = (1.0, 0.0)
WRONG_SIDE_SHIFT = (0.5, 0.3)


def criterion_9(seed: int, n: int = 1_000_000) -> Report:
    """Haar measure: log 2 on (0, 1), invariance on both sides, and the wrong-side probe."""
    checks, metrics = {}, {}
    ss = np.random.SeedSequence([seed, 900]).generate_state(8)
    ctx = PopaCtx.make([1.0])
    est = apps.haar_measure_mc(apps.HaarJob(ctx, apps.Box([0.0], [1.0]), "right", n, int(ss[0])))
    z = abs(est.value - math.log(2.0)) / est.se
    metrics["log2"] = {"estimate": est.value, "se": est.se, "z": z}
    checks["log2"] = z <= 3.0
    for d in (1, 2, 3):
        c = PopaCtx.make(HAAR_RHO[:d])
        box = apps.Box(np.zeros(d), np.ones(d))
        for j, side in enumerate(apps.SIDES):
            rep = apps.haar_invariance_check(c, box, np.array(HAAR_SHIFT[:d]), side, n, int(ss[1 + 2 * (d - 1) + j]))
            metrics[f"{side}_d{d}_z"] = rep.metrics["z"]
            checks[f"{side}_d{d}"] = rep.passed
    c = PopaCtx.make(WRONG_SIDE_RHO)
    rep = apps.haar_invariance_check(c, apps.Box(np.zeros(2), np.ones(2)), np.array(WRONG_SIDE_SHIFT), "left", n,
                                     int(ss[7]), density_side="right")
    metrics["wrong_side_z"] = rep.metrics["z"]
    checks["wrong_side_detected"] = rep.metrics["z"] > 5.0
    return _report("criterion_9_haar", checks, metrics, seed)


# runner ----------------------------------------------------------------------------

@dataclass(frozen=True)
class Criterion:
    number: int
    title: str
    run: Callable[[int], Report]
    time_limit: float | None = None


CRITERIA = (
    Criterion(1, "group laws", criterion_1, 5.0),
    Criterion(2, "scalar homomorphism table", criterion_2),
    Criterion(3, "sum witnesses", criterion_3),
    Criterion(4, "homomorphism families", criterion_4),
    Criterion(5, "a_n orbit oracle", criterion_5),
    Criterion(6, "index laws", criterion_6),
    Criterion(7, "GRV kernel estimator", criterion_7, 10.0),
    Criterion(8, "extreme-value kernels", criterion_8),
    Criterion(9, "Haar measure", criterion_9, 30.0),
)


def run_criterion(c: Criterion, seed: int) -> tuple[Report, float]:
    """Run one criterion; a time limit, when set, is folded into pass/fail."""
    t0 = time.perf_counter()
    rep = c.run(seed)
    elapsed = time.perf_counter() - t0
    if c.time_limit is not None and elapsed > c.time_limit:
        rep.passed = False
        rep.failures.append(f"runtime over {c.time_limit:g} s")
    return rep, elapsed
