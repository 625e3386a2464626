"""Command-line front end.

Every subcommand prints one JSON object on stdout with ``command``,
``inputs_digest``, ``seed``, ``passed``, ``metrics``, ``failures`` and
``wall_time``. Exit codes: 0 pass, 1 verification failure, 2 usage or
domain error. Vector flags take comma-separated values; write negative
leading entries with '=' (``--x=-1,2``) so they are not read as options.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from importlib import resources
from typing import Any

import jsonschema
import numpy as np

from . import acceptance, apps, grv
from .core import PopaCtx, circle, commutator_defect, eta, inverse, is_member, parse_vector
from .errors import NonConvergent, PopaError
from .homs import classify_hom, hom_validate, residual_sweep, spec_from_dict
from .radial import combination_witness, sum_witness
from .report import jsonable
from .scalar_homs import BoMap, ExtParam, bo_eval_table, bo_hom_residual, sample_domain

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# -- schemas and I/O ------------------------------------------------------------------

def load_schema(name: str) -> dict:
    text = resources.files("popa").joinpath("schemas", f"{name}.schema.json").read_text(encoding="utf-8")
    return json.loads(text)


def load_spec_file(path: str) -> tuple[dict, bytes]:
    with open(path, "rb") as fh:
        raw = fh.read()
    try:
        data = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise UsageError(f"{path}: not valid JSON ({exc})") from exc
    try:
        jsonschema.validate(data, load_schema("homspec"))
    except jsonschema.ValidationError as exc:
        raise UsageError(f"{path}: not a HomSpec ({exc.message})") from exc
    return data, raw


def default_seed() -> int:
    env = os.environ.get("POPA_SEED")
    if env is None or env.strip() == "":
        return 0
    try:
        return int(env)
    except ValueError as exc:
        raise UsageError(f"POPA_SEED must be an integer, got {env!r}") from exc


def _digest(args: argparse.Namespace, blobs: list[bytes]) -> str:
    h = hashlib.sha256()
    items = {k: v for k, v in sorted(vars(args).items()) if k not in ("func",)}
    h.update(json.dumps(jsonable(items), sort_keys=True).encode())
    for b in blobs:
        h.update(hashlib.sha256(b).digest())
    return h.hexdigest()


def _vec(text: str, exact: bool = False) -> np.ndarray:
    try:
        return parse_vector(text, exact)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad vector {text!r}: {exc}") from exc


# -- subcommands ------------------------------------------------------------------
# each returns (passed, metrics, failures, extra top-level fields, input blobs)

def cmd_eval(a):
    ctx = PopaCtx.make(_vec(a.rho, a.exact), exact=a.exact)
    x = ctx.point(_vec(a.x, a.exact))
    needs_y = a.op in ("circle", "commutator")
    if needs_y and a.y is None:
        raise UsageError(f"--op {a.op} needs --y")
    if a.op == "circle":
        out = circle(ctx, x, ctx.point(_vec(a.y, a.exact)))
    elif a.op == "inverse":
        out = inverse(ctx, x)
    elif a.op == "eta":
        out = eta(ctx, x)
    elif a.op == "member":
        out = is_member(ctx, x)
    else:
        out = commutator_defect(ctx, x, ctx.point(_vec(a.y, a.exact)))
    return True, {}, [], {"result": out}, []


def cmd_verify_hom(a):
    data, raw = load_spec_file(a.spec)
    spec = spec_from_dict(data)
    val = hom_validate(spec)
    if not val.passed:
        return False, {"validation": val.to_dict()}, val.failures, {}, [raw]
    rep = residual_sweep(spec, spec.ctx_x, spec.ctx_y, a.pairs, a.seed, a.tol, a.chunk, a.workers)
    return rep.passed, rep.metrics, rep.failures, {"family": spec.family}, [raw]


def cmd_classify(a):
    data, raw = load_spec_file(a.spec)
    spec = spec_from_dict(data)
    if not hom_validate(spec).passed:
        raise UsageError("spec fails its family constraints; nothing to classify")
    got = classify_hom(lambda x: spec.raw(x), spec.ctx_x, spec.ctx_y, seed=a.seed, n_probe=a.probes)
    fitted = got.spec.to_dict()
    jsonschema.validate(jsonable(fitted), load_schema("homspec"))
    metrics = {"fit_residual": got.fit_residual, "probe_log": got.probe_log}
    return True, metrics, [], {"family": got.family, "spec": fitted}, [raw]


def _vec_list(text: str, exact: bool) -> list[np.ndarray]:
    return [_vec(part, exact) for part in text.split(";") if part.strip()]


def cmd_witness(a):
    ctx = PopaCtx.make(_vec(a.rho, a.exact), exact=a.exact)
    if a.gens is not None:
        gens = [ctx.point(g) for g in _vec_list(a.gens, a.exact)]
        alphas = list(_vec(a.alphas, a.exact)) if a.alphas else [1] * len(gens)
        w = combination_witness(ctx, gens, alphas)
    else:
        if a.u is None or a.v is None:
            raise UsageError("witness needs --u and --v, or --gens")
        w = sum_witness(ctx, ctx.point(_vec(a.u, a.exact)), ctx.point(_vec(a.v, a.exact)))
    dev = w.deviation(ctx)
    on_lines = w.letters_on_halflines(ctx)
    passed = on_lines and (dev == 0 if ctx.exact else dev <= 1e-12)
    word = [{"element": l.element, "scale": l.scale, "base": l.base, "note": l.note} for l in w.word]
    metrics = {"deviation": dev, "letters_on_halflines": on_lines}
    extra = {"target": w.target, "value": w.evaluate(ctx), "word": word,
             "steps": [{"case": t, "delta": d} for t, d in w.steps], "perm": w.perm}
    return passed, metrics, [] if passed else ["witness does not reproduce the target"], extra, []


def cmd_bo(a):
    m = BoMap(ExtParam.parse(a.rho), ExtParam.parse(a.sigma), a.kappa)
    extra, metrics, failures, passed = {}, {}, [], True
    if a.t is not None:
        psi = m(a.t)
        table = bo_eval_table(m, a.t)
        extra["psi"] = psi
        metrics["table_dev"] = abs(psi - table) / max(1.0, abs(table))
    if a.verify:
        rng = np.random.default_rng(a.seed)
        s, t = sample_domain(m.rho, a.verify, rng, 1.0), sample_domain(m.rho, a.verify, rng, 1.0)
        rep = bo_hom_residual(m, list(zip(s.tolist(), t.tolist())), a.tol)
        metrics.update(rep.metrics)
        passed, failures = rep.passed, rep.failures
    if a.t is None and not a.verify:
        raise UsageError("bo needs --t or --verify")
    return passed, metrics, failures, extra, []


def cmd_grv(a):
    kw = {"gamma": a.gamma} if a.gamma is not None else {}
    try:
        p = grv.builtin(a.problem, **kw)
    except TypeError as exc:
        raise UsageError(f"{a.problem} takes no --gamma") from exc
    p.schedule = grv.Schedule(a.t0, a.ratio, a.k_max, a.tol_rel, a.streak)
    fn = {"kernel": grv.grv_kernel, "g": grv.grv_g, "eta": grv.grv_eta}[a.quantity]
    exact_fn = {"kernel": p.K_exact, "g": p.g_exact, "eta": p.eta_exact}[a.quantity]
    x = np.atleast_1d(np.asarray(_vec(a.x), dtype=np.float64))
    try:
        est = fn(p, x)
    except NonConvergent as exc:
        return False, {"estimate": exc.estimate}, [str(exc)], {"value": None, "converged": False}, []
    metrics = {"t_final": est.t_final, "last_deltas": est.last_deltas}
    failures = []
    if exact_fn is not None:
        ex = exact_fn(x)
        err = float(np.max(np.abs(np.asarray(est.value) - np.asarray(ex))))
        metrics.update({"analytic": ex, "abs_error": err})
        if err > a.tol:
            failures.append(f"estimate off the analytic value by {err:.3e}")
    return not failures, metrics, failures, {"value": est.value, "converged": est.converged}, []


def cmd_evt(a):
    if a.evt_cmd == "E":
        return True, {}, [], {"value": apps.evt_E(apps.EvtParams(a.kappa, a.gamma), a.t)}, []
    if a.evt_cmd == "A":
        return True, {}, [], {"value": apps.evt_A(a.gamma, a.t)}, []
    if a.evt_cmd == "gev":
        return True, {"type": apps.gev_type(a.gamma)}, [], {"value": apps.gev_cdf(a.gamma, a.x)}, []
    if a.evt_cmd == "goldie":
        rng = np.random.default_rng(a.seed)
        pairs = np.exp(rng.uniform(-a.spread, a.spread, size=(a.pairs, 2)))
        rep = apps.evt_goldie_residual(apps.EvtParams(a.kappa, a.gamma), pairs.tolist(), a.tol)
        return rep.passed, rep.metrics, rep.failures, {}, []
    with open(a.csv, "rb") as fh:
        blob = fh.read()
    fit = apps.fit_E(apps.read_evt_csv(a.csv), (a.lo, a.hi))
    metrics = {"rmse": fit.residual, "iterations": fit.iterations, "type": apps.gev_type(fit.params.gamma)}
    return True, metrics, [], {"kappa": fit.params.kappa, "gamma": fit.params.gamma}, [blob]


def cmd_haar(a):
    ctx = PopaCtx.make(_vec(a.rho))
    box = apps.Box(_vec(a.lo), _vec(a.hi))
    if a.translate is None:
        job = apps.HaarJob(ctx, box, a.density or a.side, a.n, a.seed)
        est = apps.haar_measure_mc(job)
        return True, {"estimate": est.value, "se": est.se, "n": est.n}, [], {}, []
    rep = apps.haar_invariance_check(ctx, box, _vec(a.translate), a.side, a.n, a.seed, a.density, a.k_se)
    return rep.passed, rep.metrics, rep.failures, {}, []


def cmd_selftest(a):
    only = {int(s) for s in a.only.split(",")} if a.only else None
    results, failures, times = {}, [], {}
    for c in acceptance.CRITERIA:
        if only is not None and c.number not in only:
            continue
        rep, elapsed = acceptance.run_criterion(c, a.seed)
        times[f"criterion_{c.number}"] = round(elapsed, 3)
        results[f"criterion_{c.number}"] = {"title": c.title, **rep.to_dict()}
        if not rep.passed:
            failures.append(f"criterion {c.number} ({c.title}): " + "; ".join(rep.failures))
        if not a.json:
            print(f"[{'PASS' if rep.passed else 'FAIL'}] criterion {c.number}: {c.title} ({elapsed:.2f} s)",
                  file=sys.stderr)
    return not failures, results, failures, {"_times": times}, []


# -- parser -------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="popa", description="Popa circle groups: arithmetic, homomorphisms, limits.")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(func=func)
        p.add_argument("--seed", type=int, default=None, help="master seed (default: $POPA_SEED or 0)")
        return p

    p = add("eval", cmd_eval, "group arithmetic")
    p.add_argument("--rho", required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--y")
    p.add_argument("--op", choices=["circle", "inverse", "eta", "member", "commutator"], default="circle")
    p.add_argument("--exact", action="store_true", help="rational arithmetic; entries may be p/q")

    p = add("verify-hom", cmd_verify_hom, "residual sweep of a HomSpec file")
    p.add_argument("--spec", required=True)
    p.add_argument("--pairs", type=int, default=10_000)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--chunk", type=int, default=2048)
    p.add_argument("--workers", type=int, default=1)

    p = add("classify", cmd_classify, "black-box classification of a HomSpec")
    p.add_argument("--spec", required=True)
    p.add_argument("--probes", type=int, default=64)

    p = add("witness", cmd_witness, "sum / combination witnesses")
    p.add_argument("--rho", required=True)
    p.add_argument("--u")
    p.add_argument("--v")
    p.add_argument("--gens", help="generators separated by ';'")
    p.add_argument("--alphas", help="coefficients, comma-separated")
    p.add_argument("--exact", action="store_true")

    p = add("bo", cmd_bo, "scalar homomorphism table")
    p.add_argument("--rho", required=True, help="0, a positive number, or inf")
    p.add_argument("--sigma", required=True)
    p.add_argument("--kappa", type=float, required=True)
    p.add_argument("--t", type=float)
    p.add_argument("--verify", type=int, default=0, help="number of seeded pairs for a residual check")
    p.add_argument("--tol", type=float, default=1e-10)

    p = add("grv", cmd_grv, "GRV kernel limits for builtin problems")
    p.add_argument("--problem", required=True, help=f"builtin:{{{','.join(grv.BUILTINS)}}}")
    p.add_argument("--x", required=True)
    p.add_argument("--quantity", choices=["kernel", "g", "eta"], default="kernel")
    p.add_argument("--gamma", type=float)
    p.add_argument("--tol", type=float, default=1e-4)
    p.add_argument("--t0", type=float, default=1.0)
    p.add_argument("--ratio", type=float, default=4.0)
    p.add_argument("--k-max", type=int, default=60)
    p.add_argument("--tol-rel", type=float, default=1e-6)
    p.add_argument("--streak", type=int, default=3)

    p = add("evt", cmd_evt, "extreme-value kernels")
    esub = p.add_subparsers(dest="evt_cmd", required=True)
    e = esub.add_parser("E")
    e.add_argument("--kappa", type=float, required=True)
    e.add_argument("--gamma", type=float, required=True)
    e.add_argument("--t", type=float, required=True)
    e = esub.add_parser("A")
    e.add_argument("--gamma", type=float, required=True)
    e.add_argument("--t", type=float, required=True)
    e = esub.add_parser("gev")
    e.add_argument("--gamma", type=float, required=True)
    e.add_argument("--x", type=float, required=True)
    e = esub.add_parser("goldie")
    e.add_argument("--kappa", type=float, required=True)
    e.add_argument("--gamma", type=float, required=True)
    e.add_argument("--pairs", type=int, default=1000)
    e.add_argument("--spread", type=float, default=0.7)
    e.add_argument("--tol", type=float, default=1e-12)
    e = esub.add_parser("fit")
    e.add_argument("--csv", required=True, help="two columns t,E_obs with a header line")
    e.add_argument("--lo", type=float, default=-10.0)
    e.add_argument("--hi", type=float, default=10.0)
    for e in esub.choices.values():
        e.add_argument("--seed", type=int, default=argparse.SUPPRESS)

    p = add("haar", cmd_haar, "Haar measure Monte Carlo")
    p.add_argument("--rho", required=True)
    p.add_argument("--lo", required=True)
    p.add_argument("--hi", required=True)
    p.add_argument("--side", choices=apps.SIDES, default="right")
    p.add_argument("--density", choices=apps.SIDES, help="density to integrate (default: matches --side)")
    p.add_argument("--translate", help="element a; compares box with its translate")
    p.add_argument("--n", type=int, default=1_000_000)
    p.add_argument("--k-se", type=float, default=3.0)

    p = add("selftest", cmd_selftest, "run the acceptance suite")
    p.add_argument("--json", action="store_true", help="suppress the per-criterion lines on stderr")
    p.add_argument("--only", help="comma-separated criterion numbers")
    return ap


def run(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    t0 = time.perf_counter()
    command = args.command if args.command != "evt" else f"evt {args.evt_cmd}"
    try:
        if args.seed is None:
            args.seed = default_seed()
        passed, metrics, failures, extra, blobs = args.func(args)
        code = EXIT_PASS if passed else EXIT_FAIL
    except (UsageError, PopaError, OSError, ZeroDivisionError) as exc:
        print(f"popa {command}: error: {exc}", file=sys.stderr)
        doc = {"command": command, "error": f"{type(exc).__name__}: {exc}"}
        print(json.dumps(doc), file=out)
        return EXIT_USAGE
    times = extra.pop("_times", None)
    wall = round(time.perf_counter() - t0, 3)
    doc: dict[str, Any] = {
        "command": command,
        "inputs_digest": _digest(args, blobs),
        "seed": args.seed,
        "passed": bool(passed),
        **extra,
        "metrics": metrics,
        "failures": [str(f) for f in failures],
        "wall_time": {"total": wall, **times} if times else wall,
    }
    doc = jsonable(doc)
    jsonschema.validate(doc, load_schema("report"))
    print(json.dumps(doc, allow_nan=False), file=out)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
