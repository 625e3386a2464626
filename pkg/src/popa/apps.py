"""Extreme-value kernels and the Popa Haar measure.

EVT: the Goldie kernel E(t) = kappa (t^gamma - 1)/gamma with auxiliary
A(t) = t^gamma, the GEV distribution, and a least-squares fit of (kappa,
gamma) to observed kernel values.

Haar: on G_rho(R^d) the density 1/(1 + rho(x)) is right-invariant and
1/(1 + rho(x))^d is left-invariant. Both are estimated by Monte Carlo over
axis-aligned boxes and their translates.
"""
from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .core import PopaCtx, circle_rows, eta, eta_rows, inverse, is_member
from .errors import BoxOutsideDomain, DegenerateFit, DomainViolation, NonMember, PopaError
from .report import Report

GAMMA_ZERO = 1e-8


# -- extreme-value kernels ----------------------------------------------------------

@dataclass(frozen=True)
class EvtParams:
    kappa: float
    gamma: float


def _pos(t: float) -> float:
    t = float(t)
    if not t > 0:
        raise DomainViolation(f"t must be positive, got {t}")
    return t


def _boxcox(gamma: float, logt):
    """(t^gamma - 1)/gamma from log t, with the log t limit at gamma = 0."""
    if abs(gamma) < GAMMA_ZERO:
        return logt * (1.0 + 0.5 * gamma * logt)
    return np.expm1(gamma * logt) / gamma


def evt_E(p: EvtParams, t: float) -> float:
    return float(p.kappa * _boxcox(p.gamma, math.log(_pos(t))))


def evt_A(gamma: float, t: float) -> float:
    return math.exp(gamma * math.log(_pos(t)))


def evt_goldie_residual(p: EvtParams, pairs: Iterable[tuple[float, float]], tol: float = 1e-12) -> Report:
    """max |E(xy) - E(x) A(y) - E(y)| over positive pairs."""
    worst, arg, n = 0.0, None, 0
    for x, y in pairs:
        r = abs(evt_E(p, _pos(x) * _pos(y)) - evt_E(p, x) * evt_A(p.gamma, y) - evt_E(p, y))
        if arg is None or r > worst:
            worst, arg = r, (float(x), float(y))
        n += 1
    failures = [] if worst <= tol else [f"Goldie residual {worst:.3e} > {tol:g} at {arg}"]
    return Report("evt_goldie_residual", not failures,
                  {"max_residual": worst, "argmax": arg, "pairs": n, "kappa": p.kappa, "gamma": p.gamma},
                  failures)


def gev_cdf(gamma: float, x: float) -> float:
    """exp(-(1 + gamma x)^(-1/gamma)), extended by 0 / 1 outside the support."""
    if abs(gamma) < GAMMA_ZERO:
        return math.exp(-math.exp(-x))
    z = 1.0 + gamma * x
    if z <= 0.0:
        return 0.0 if gamma > 0 else 1.0
    return math.exp(-math.exp(-math.log(z) / gamma))


# Naming: the standard convention versus the labels printed in the source
# text for the same sign of gamma. Formulas do not depend on the labels.
GEV_NAMES = {
    "positive": {"standard": "Frechet", "source_text": "Gumbel"},
    "zero": {"standard": "Gumbel", "source_text": "Frechet"},
    "negative": {"standard": "Weibull", "source_text": "Weibull"},
}


def gev_type(gamma: float) -> dict:
    key = "zero" if abs(gamma) < GAMMA_ZERO else ("positive" if gamma > 0 else "negative")
    return {"sign": key, **GEV_NAMES[key], "names_agree": GEV_NAMES[key]["standard"] == GEV_NAMES[key]["source_text"]}


@dataclass
class EvtFit:
    params: EvtParams
    residual: float          # root-mean-square error
    iterations: int


def _profile(gamma: float, logt: np.ndarray, E: np.ndarray) -> tuple[float, float]:
    """Best kappa for fixed gamma and the resulting sum of squares."""
    b = _boxcox(gamma, logt)
    bb = float(b @ b)
    if bb == 0.0:
        return 0.0, float(E @ E)
    kappa = float(b @ E) / bb
    r = E - kappa * b
    return kappa, float(r @ r)


def fit_E(samples: Sequence[tuple[float, float]], bracket: tuple[float, float] = (-10.0, 10.0),
          tol: float = 1e-6, grid: int = 201) -> EvtFit:
    """Least-squares (kappa, gamma) for observations E_obs ~ kappa (t^gamma - 1)/gamma.

    gamma is located on a coarse grid over ``bracket`` and refined by
    golden-section search; kappa is the closed-form regression slope.
    """
    data = np.asarray(samples, dtype=np.float64)
    if data.ndim != 2 or data.shape[1] != 2 or data.shape[0] < 3:
        raise PopaError("fit_E needs at least 3 (t, E_obs) samples")
    t, E = data[:, 0], data[:, 1]
    if not np.all(t > 0):
        raise DomainViolation("all t must be positive")
    if float(np.max(np.abs(E))) <= 1e-14:
        raise DegenerateFit("all observations are zero: kappa = 0 and gamma is unidentifiable")
    if float(np.ptp(E)) == 0.0:
        raise DegenerateFit("observations are constant")
    logt = np.log(t)
    lo, hi = bracket
    gs = np.linspace(lo, hi, grid)
    sse = np.array([_profile(g, logt, E)[1] for g in gs])
    i = int(np.argmin(sse))
    if 0 < i < grid - 1:
        res = minimize_scalar(lambda g: _profile(g, logt, E)[1], bracket=(gs[i - 1], gs[i], gs[i + 1]),
                              method="golden", tol=tol)
        g_hat, iters = float(res.x), int(res.nit)
    else:
        g_hat, iters = float(gs[i]), 0
    k_hat, s = _profile(g_hat, logt, E)
    return EvtFit(EvtParams(k_hat, g_hat), math.sqrt(s / len(E)), iters)


def read_evt_csv(path: str) -> list[tuple[float, float]]:
    """Two-column CSV (t, E_obs) with a one-line header."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if len(rows) < 2:
        raise PopaError(f"{path}: expected a header line and data rows")
    out = []
    for k, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 2:
            raise PopaError(f"{path}:{k}: expected two columns")
        out.append((float(row[0]), float(row[1])))
    return out


# -- Haar measure ---------------------------------------------------------------------

SIDES = ("right", "left")


def _side(side: str) -> str:
    s = side.lower()
    if s not in SIDES:
        raise PopaError(f"side must be 'right' or 'left', got {side!r}")
    return s


def haar_density(ctx: PopaCtx, x: np.ndarray, side: str = "right", d: int | None = None) -> float:
    """1/(1 + rho(x)) for the right measure, 1/(1 + rho(x))^d for the left."""
    if not is_member(ctx, x):
        raise NonMember("Haar density outside G_rho")
    e = float(eta(ctx, np.asarray(x, dtype=np.float64)))
    return 1.0 / e if _side(side) == "right" else e ** -(ctx.dim if d is None else d)


def density_rows(ctx: PopaCtx, X: np.ndarray, side: str) -> np.ndarray:
    e = eta_rows(ctx, X)
    return 1.0 / e if _side(side) == "right" else e ** (-float(ctx.dim))


@dataclass(frozen=True)
class Box:
    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo, hi = np.asarray(self.lo, dtype=np.float64), np.asarray(self.hi, dtype=np.float64)
        if lo.shape != hi.shape or lo.ndim != 1 or not np.all(lo < hi):
            raise PopaError("box needs lo < hi componentwise")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def volume(self) -> float:
        return float(np.prod(self.hi - self.lo))

    def corners(self) -> np.ndarray:
        return np.array(list(itertools.product(*zip(self.lo, self.hi))))

    def contains_rows(self, X: np.ndarray) -> np.ndarray:
        return np.all((X >= self.lo) & (X <= self.hi), axis=1)


def check_box(ctx: PopaCtx, box: Box) -> None:
    """Box inside G_rho: rho is linear, so its minimum over the box is at a corner."""
    if box.lo.size != ctx.dim:
        raise PopaError("box dimension differs from the group")
    c = np.asarray(ctx.rho.coeffs, dtype=np.float64)
    rho_min = float(np.sum(np.minimum(c * box.lo, c * box.hi)))
    if not 1.0 + rho_min > ctx.eps_mem:
        raise BoxOutsideDomain(f"box reaches 1 + rho = {1.0 + rho_min:.3g}")


@dataclass(frozen=True)
class HaarJob:
    ctx: PopaCtx
    box: Box
    side: str = "right"
    n: int = 1_000_000
    seed: int = 0
    chunk: int = 1 << 17

    def __post_init__(self):
        _side(self.side)
        if self.n < 1000:
            raise PopaError("Haar jobs need n >= 1000")
        check_box(self.ctx, self.box)


@dataclass
class HaarEstimate:
    value: float
    se: float
    n: int


def _mc(ctx: PopaCtx, bound: Box, inside, side: str, n: int, seed: int, chunk: int) -> HaarEstimate:
    """Integral of the density over {y in bound : inside(y)} from uniform draws on bound.

    Chunks draw from children of SeedSequence(seed) and their sums are
    reduced in chunk order.
    """
    n_chunks = -(-n // chunk)
    children = np.random.SeedSequence(seed).spawn(n_chunks)
    s1 = s2 = 0.0
    for i, child in enumerate(children):
        m = min(chunk, n - i * chunk)
        rng = np.random.default_rng(child)
        Y = bound.lo + (bound.hi - bound.lo) * rng.random((m, bound.lo.size))
        w = np.where(inside(Y), density_rows(ctx, Y, side), 0.0)
        s1 += float(w.sum())
        s2 += float(w @ w)
    mean = s1 / n
    var = max(s2 / n - mean * mean, 0.0)
    vol = bound.volume
    return HaarEstimate(vol * mean, vol * math.sqrt(var / (n - 1)), n)


def haar_measure_mc(job: HaarJob) -> HaarEstimate:
    return _mc(job.ctx, job.box, lambda Y: np.ones(len(Y), dtype=bool), job.side, job.n, job.seed, job.chunk)


def translate_rows(ctx: PopaCtx, X: np.ndarray, a: np.ndarray, side: str) -> np.ndarray:
    """x o a (right) or a o x (left), row-wise."""
    A = np.broadcast_to(a, X.shape)
    return circle_rows(ctx, X, A) if _side(side) == "right" else circle_rows(ctx, A, X)


def translate_measure_mc(job: HaarJob, a: np.ndarray, translate_side: str | None = None) -> HaarEstimate:
    """Measure of box o a (or a o box) under the job's density.

    The image of a box under either translation is affine, so its corners
    bound it; draws on that bounding box count when pulled back into the box.
    """
    ctx, box = job.ctx, job.box
    side = _side(translate_side or job.side)
    a = np.asarray(a, dtype=np.float64)
    if not is_member(ctx, a):
        raise NonMember("translation element outside G_rho")
    img = translate_rows(ctx, box.corners(), a, side)
    lo, hi = img.min(axis=0), img.max(axis=0)
    bound = Box(lo, np.where(hi > lo, hi, lo + 1e-300))
    check_box(ctx, bound)
    ainv = inverse(ctx, a)

    def inside(Y):
        return box.contains_rows(translate_rows(ctx, Y, ainv, side))

    return _mc(ctx, bound, inside, job.side, job.n, job.seed, job.chunk)


def haar_invariance_check(ctx: PopaCtx, box: Box, a, side: str = "right", n: int = 1_000_000,
                          seed: int = 0, density_side: str | None = None, k_se: float = 3.0) -> Report:
    """Compare mu(box) with mu(box o a) (right) or mu(a o box) (left).

    The density defaults to the one matching ``side``; pass
    ``density_side`` to probe the mismatched pairing. Both estimates share
    the seed, so a = 0 reproduces the box estimate bit for bit.
    """
    side = _side(side)
    job = HaarJob(ctx, box, density_side or side, n, seed)
    base = translate_measure_mc(job, np.zeros(ctx.dim), side)
    moved = translate_measure_mc(job, a, side)
    comb = math.hypot(base.se, moved.se)
    diff = moved.value - base.value
    z = abs(diff) / comb if comb > 0 else (0.0 if diff == 0 else math.inf)
    passed = z <= k_se
    metrics = {"mu_box": base.value, "se_box": base.se, "mu_translate": moved.value, "se_translate": moved.se,
               "deviation": diff, "relative_deviation": diff / base.value if base.value else math.inf,
               "combined_se": comb, "z": z, "side": side, "density": job.side, "n": n}
    failures = [] if passed else [f"deviation {z:.2f} combined SE > {k_se:g}"]
    return Report("haar_invariance", passed, metrics, failures, seed)
