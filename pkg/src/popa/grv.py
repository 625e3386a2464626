"""Numerical limits from general regular variation.

The kernel of f relative to (phi, h) is

    K(x) = lim_{t -> inf} [f(tx + x phi(tx)) - f(tx)] / h(tx),

and g(x) = lim h(tx + x phi(tx)) / h(tx) is its auxiliary. Limits are
estimated along t_k = t0 * ratio^k and declared converged after ``streak``
consecutive relative deltas below ``tol_rel``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import NonConvergent, NotCollinear, PopaError, ZeroDirection
from .report import Report


@dataclass(frozen=True)
class Schedule:
    t0: float = 1.0
    ratio: float = 4.0
    k_max: int = 60
    tol_rel: float = 1e-6
    streak: int = 3

    def __post_init__(self):
        if not (self.t0 > 0 and self.ratio > 1 and self.k_max > 0 and self.tol_rel > 0):
            raise PopaError("schedule needs t0 > 0, ratio > 1, k_max > 0, tol_rel > 0")
        if self.streak < 2:
            raise PopaError("streak must be at least 2")

    def times(self):
        for k in range(self.k_max + 1):
            yield self.t0 * self.ratio ** k


@dataclass
class LimitEstimate:
    value: float | np.ndarray
    converged: bool
    last_deltas: list[float]
    t_final: float


@dataclass
class GrvProblem:
    """f, phi, h on R^d, plus optional analytic K, g and eta for self-checks.

    ``arg_map`` converts a user-facing argument into the GRV coordinate; the
    analytic callables take the user-facing argument.
    """

    name: str
    f: Callable[[np.ndarray], object]
    phi: Callable[[np.ndarray], float]
    h: Callable[[np.ndarray], float]
    dim: int = 1
    schedule: Schedule = field(default_factory=Schedule)
    arg_map: Callable[[np.ndarray], np.ndarray] | None = None
    K_exact: Callable[[np.ndarray], object] | None = None
    g_exact: Callable[[np.ndarray], float] | None = None
    eta_exact: Callable[[np.ndarray], float] | None = None

    def coord(self, x) -> np.ndarray:
        x = np.atleast_1d(np.asarray(x, dtype=np.float64))
        if x.shape != (self.dim,):
            raise PopaError(f"{self.name} expects dimension {self.dim}")
        return self.arg_map(x) if self.arg_map is not None else x


def _pack(v) -> tuple[np.ndarray, bool]:
    a = np.asarray(v, dtype=np.float64)
    return np.atleast_1d(a), a.ndim == 0


def limit(seq: Callable[[float], object], schedule: Schedule) -> LimitEstimate:
    """Streak-rule limit of seq(t) as t runs through the schedule."""
    prev = None
    deltas: list[float] = []
    run = 0
    scalar = True
    t = schedule.t0
    for t in schedule.times():
        cur, scalar = _pack(seq(t))
        if not np.all(np.isfinite(cur)):
            est = None if prev is None else (float(prev[0]) if scalar else prev)
            raise NonConvergent(f"non-finite value at t={t:g}", estimate=est)
        if prev is not None:
            d = float(np.max(np.abs(cur - prev) / np.maximum(1.0, np.abs(cur))))
            deltas.append(d)
            run = run + 1 if d <= schedule.tol_rel else 0
            if run >= schedule.streak:
                value = float(cur[0]) if scalar else cur
                return LimitEstimate(value, True, deltas[-schedule.streak:], t)
        prev = cur
    est = float(prev[0]) if scalar else prev
    raise NonConvergent(f"no {schedule.streak}-streak below {schedule.tol_rel:g} by t={t:g}", estimate=est)


def _z(z) -> np.ndarray:
    return np.atleast_1d(np.asarray(z, dtype=np.float64))


def kernel_at(p: GrvProblem, z) -> LimitEstimate:
    """grv_kernel in GRV coordinates (no arg_map)."""
    z = _z(z)
    if not np.any(z):
        v, scalar = _pack(p.f(np.ones_like(z)))
        return LimitEstimate(0.0 if scalar else np.zeros_like(v), True, [], 0.0)

    def seq(t):
        tz = t * z
        return (np.asarray(p.f(tz + z * p.phi(tz)), dtype=np.float64)
                - np.asarray(p.f(tz), dtype=np.float64)) / p.h(tz)

    return limit(seq, p.schedule)


def g_at(p: GrvProblem, z) -> LimitEstimate:
    z = _z(z)
    if not np.any(z):
        return LimitEstimate(1.0, True, [], 0.0)
    return limit(lambda t: p.h(t * z + z * p.phi(t * z)) / p.h(t * z), p.schedule)


def eta_at(p: GrvProblem, z) -> LimitEstimate:
    """eta^phi(z) = lim phi(tz + z phi(tz)) / phi(tz)."""
    z = _z(z)
    if not np.any(z):
        return LimitEstimate(1.0, True, [], 0.0)
    return limit(lambda t: p.phi(t * z + z * p.phi(t * z)) / p.phi(t * z), p.schedule)


def grv_kernel(p: GrvProblem, x) -> LimitEstimate:
    return kernel_at(p, p.coord(x))


def grv_g(p: GrvProblem, x) -> LimitEstimate:
    return g_at(p, p.coord(x))


def grv_eta(p: GrvProblem, x) -> LimitEstimate:
    return eta_at(p, p.coord(x))


def grv_kernel_radial(p: GrvProblem, u, xi: float) -> LimitEstimate:
    """K_u(xi u) = lim_s [f(su + xi u phi(su)) - f(su)] / h(su), for xi > 0.

    Same limit as the kernel at xi u, but sampled at s = t xi; ``u`` is in
    GRV coordinates.
    """
    u = _z(u)
    if not np.any(u):
        raise ZeroDirection("radial kernel along the zero vector")
    if not xi > 0:
        raise PopaError("radial substitution s = t xi needs xi > 0")
    x = xi * u

    def seq(s):
        su = s * u
        return (np.asarray(p.f(su + x * p.phi(su)), dtype=np.float64)
                - np.asarray(p.f(su), dtype=np.float64)) / p.h(su)

    return limit(seq, p.schedule)


def se_check(phi: Callable[[np.ndarray], float], u, v_grid: Sequence[float],
             schedule: Schedule = Schedule(), growth_tol: float = 1e-3) -> Report:
    """Beurling ratio limits eta_u(v) on a v-grid plus the O(t) growth check.

    The ratio is phi(tu + v u phi(tu)) / phi(tu), with v a coordinate on <u>.
    Growth passes when phi(t_k u)/t_k does not increase by more than
    ``growth_tol`` (relative) over the last half of the schedule.
    """
    u = np.atleast_1d(np.asarray(u, dtype=np.float64))
    if not np.any(u):
        raise ZeroDirection("se_check along the zero vector")
    etas = []
    for v in v_grid:
        est = limit(lambda t: phi(t * u + v * u * phi(t * u)) / phi(t * u), schedule)
        etas.append(est.value)
    ts = list(schedule.times())
    half = ts[len(ts) // 2:]
    growth = [abs(phi(t * u)) / t for t in half]
    bounded = all(growth[i + 1] <= growth[i] * (1 + growth_tol) + 1e-300 for i in range(len(growth) - 1))
    failures = [] if bounded else ["phi(tu)/t keeps growing: phi(tu) is not O(t)"]
    return Report("se_check", bounded,
                  {"v_grid": list(map(float, v_grid)), "eta_hat": etas, "growth_last": growth[-1]},
                  failures)


def _collinear(x: np.ndarray, y: np.ndarray, tol: float = 1e-12) -> bool:
    if not np.any(x) or not np.any(y):
        return True
    nx = float(x @ x)
    off = y - (float(x @ y) / nx) * x
    return float(np.max(np.abs(off))) <= tol * max(1.0, float(np.max(np.abs(y))))


def gfe_residual(K: Callable, g: Callable, eta: Callable, samples, tol: float = 5e-4) -> Report:
    """Max residuals of K(x + eta(x) y) = K(x) + g(x) K(y) and of g's product form."""
    worst_k = worst_g = 0.0
    n = 0
    for x, y in samples:
        x = np.atleast_1d(np.asarray(x, dtype=np.float64))
        y = np.atleast_1d(np.asarray(y, dtype=np.float64))
        if not _collinear(x, y):
            raise NotCollinear("gfe_residual needs y in <x>")
        z = x + eta(x) * y
        gx = g(x)
        rk = np.max(np.abs(np.asarray(K(z)) - np.asarray(K(x)) - gx * np.asarray(K(y))))
        rg = abs(g(z) - gx * g(y))
        worst_k, worst_g = max(worst_k, float(rk)), max(worst_g, float(rg))
        n += 1
    failures = []
    if worst_k > tol:
        failures.append(f"GFE residual {worst_k:.3e} > {tol:g}")
    if worst_g > tol:
        failures.append(f"product-form residual {worst_g:.3e} > {tol:g}")
    return Report("gfe_residual", not failures, {"gfe": worst_k, "gfe_mult": worst_g, "samples": n}, failures)


def estimated_triplet(p: GrvProblem):
    """(K, g, eta) as callables on GRV coordinates, each backed by a limit estimate."""
    return (lambda z: kernel_at(p, z).value, lambda z: g_at(p, z).value,
            lambda z: eta_at(p, z).value)


# -- builtin problems ------------------------------------------------------------

def _log_problem() -> GrvProblem:
    return GrvProblem(
        "log", f=lambda y: math.log(abs(y[0])), phi=lambda y: float(y[0]), h=lambda y: 1.0,
        K_exact=lambda x: math.log1p(x[0]), g_exact=lambda x: 1.0, eta_exact=lambda x: 1.0 + x[0])


def _exp_problem() -> GrvProblem:
    return GrvProblem(
        "exp", f=lambda y: math.exp(y[0]), phi=lambda y: 1.0, h=lambda y: math.exp(y[0]),
        K_exact=lambda x: math.expm1(x[0]), g_exact=lambda x: math.exp(x[0]), eta_exact=lambda x: 1.0)


def dehaan_problem(gamma: float = 0.5) -> GrvProblem:
    """U(s) = (s^gamma - 1)/gamma, a(s) = s^gamma, phi(y) = y.

    With phi(y) = y the GRV increment at z is [U(s(1 + z)) - U(s)] / a(s)
    for s = tz, the extreme-value kernel E at 1 + z. The user argument is
    that extreme-value coordinate, so arg_map is x -> x - 1. For 0 < x < 1
    the ray runs towards -inf and U, a are taken at |s|.
    """
    if gamma == 0:
        raise PopaError("dehaan builtin needs gamma != 0")
    return GrvProblem(
        f"dehaan(gamma={gamma:g})",
        f=lambda y: math.expm1(gamma * math.log(abs(y[0]))) / gamma,
        phi=lambda y: float(y[0]), h=lambda y: abs(y[0]) ** gamma,
        arg_map=lambda x: x - 1.0,
        K_exact=lambda x: math.expm1(gamma * math.log(x[0])) / gamma,
        g_exact=lambda x: x[0] ** gamma, eta_exact=lambda x: x[0])


def _shiftlog_problem() -> GrvProblem:
    """f(y) = log(1 + |y|): same kernel as builtin:log with O(1/t) bias."""
    return GrvProblem(
        "shiftlog", f=lambda y: math.log1p(abs(y[0])), phi=lambda y: float(y[0]), h=lambda y: 1.0,
        K_exact=lambda x: math.log1p(x[0]), g_exact=lambda x: 1.0, eta_exact=lambda x: 1.0 + x[0])


BUILTINS: dict[str, Callable[[], GrvProblem]] = {
    "log": _log_problem,
    "exp": _exp_problem,
    "dehaan": dehaan_problem,
    "shiftlog": _shiftlog_problem,
}


def builtin(name: str, **kw) -> GrvProblem:
    key = name.split(":", 1)[1] if name.startswith("builtin:") else name
    if key not in BUILTINS:
        raise PopaError(f"unknown builtin {name!r}; known: {sorted(BUILTINS)}")
    return BUILTINS[key](**kw)
