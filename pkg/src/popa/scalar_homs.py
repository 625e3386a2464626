"""Continuous homomorphisms between the scalar Popa groups G_rho(R).

The parameter runs over [0, inf]: 0 is (R, +), a finite r > 0 is
((-1/r, inf), o_r), and inf stands for the multiplicative group
((0, inf), x). Every cell of the 3x3 table is psi(t) = eta_sigma^{-1}
applied to eta_rho(t)^(sigma kappa / rho), with limits read off at the
parameter boundaries.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainViolation, PopaError
from .report import Report

SERIES_CUTOFF = 1e-8


@dataclass(frozen=True)
class ExtParam:
    kind: str            # "zero" | "fin" | "inf"
    r: float = 0.0

    def __post_init__(self):
        if self.kind not in ("zero", "fin", "inf"):
            raise PopaError(f"unknown parameter kind {self.kind!r}")
        if self.kind == "fin" and not (self.r > 0 and math.isfinite(self.r)):
            raise PopaError("finite Popa parameter must be positive")

    @classmethod
    def parse(cls, text) -> "ExtParam":
        s = str(text).strip().lower()
        if s in ("inf", "infinity", "oo"):
            return INF
        r = float(s)
        if r == 0:
            return ZERO
        if math.isinf(r):
            return INF
        return cls("fin", r)

    def __str__(self) -> str:
        return {"zero": "0", "inf": "inf"}.get(self.kind, repr(self.r))


ZERO = ExtParam("zero")
INF = ExtParam("inf")


def fin(r: float) -> ExtParam:
    return ExtParam("fin", float(r))


@dataclass(frozen=True)
class BoMap:
    rho: ExtParam
    sigma: ExtParam
    kappa: float

    def __call__(self, t: float) -> float:
        return bo_eval(self, t)


def ext_domain(p: ExtParam) -> tuple[float, float]:
    if p.kind == "zero":
        return (-math.inf, math.inf)
    if p.kind == "fin":
        return (-1.0 / p.r, math.inf)
    return (0.0, math.inf)


def in_domain(p: ExtParam, t: float) -> bool:
    if not math.isfinite(t):
        return False
    if p.kind == "zero":
        return True
    if p.kind == "fin":
        return 1.0 + p.r * t > 0.0
    return t > 0.0


def _require(p: ExtParam, t: float) -> None:
    if not in_domain(p, t):
        raise DomainViolation(f"{t} is outside G_{p}(R)")


def ext_circle(p: ExtParam, s: float, t: float) -> float:
    _require(p, s)
    _require(p, t)
    if p.kind == "zero":
        return s + t
    if p.kind == "fin":
        return s + t + p.r * s * t
    return s * t


def _log_eta(p: ExtParam, t: float) -> float:
    """Additive coordinate of t: t, log(1 + r t) / r, or log t."""
    if p.kind == "zero":
        return t
    if p.kind == "fin":
        return math.log1p(p.r * t) / p.r
    return math.log(t)


def _from_additive(q: ExtParam, a: float) -> float:
    """Inverse of _log_eta for the target parameter: a -> (e^{q a} - 1)/q etc."""
    if q.kind == "zero":
        return a
    if q.kind == "fin":
        z = q.r * a
        if abs(z) < SERIES_CUTOFF:
            return a * (1.0 + z / 2.0 + z * z / 6.0)
        return math.expm1(z) / q.r
    return math.exp(a)


def bo_eval(m: BoMap, t: float) -> float:
    """Table value psi(t).

    All nine cells factor through additive coordinates:
    psi = exp_sigma(kappa * log_rho(t)), where log_rho is the canonical
    isomorphism G_rho(R) -> (R, +) and exp_sigma its inverse for sigma.
    """
    _require(m.rho, t)
    return _from_additive(m.sigma, m.kappa * _log_eta(m.rho, t))


def bo_eval_table(m: BoMap, t: float) -> float:
    """Direct transcription of the nine closed forms; used as an oracle."""
    _require(m.rho, t)
    k = m.kappa
    rk, sk = m.rho.kind, m.sigma.kind
    r, s = m.rho.r, m.sigma.r
    if rk == "zero":
        if sk == "zero":
            return k * t
        if sk == "fin":
            return (math.exp(s * k * t) - 1.0) / s
        return math.exp(k * t)
    if rk == "fin":
        if sk == "zero":
            return (k / r) * math.log(1.0 + r * t)
        if sk == "fin":
            return ((1.0 + r * t) ** (s * k / r) - 1.0) / s
        return (1.0 + r * t) ** (k / r)
    if sk == "zero":
        return k * math.log(t)
    if sk == "fin":
        return (t ** (s * k) - 1.0) / s
    return t ** k


def bo_hom_residual(m: BoMap, pairs: Sequence[tuple[float, float]], tol: float = 1e-10) -> Report:
    """max |psi(s o t) - psi(s) o psi(t)| / max(1, |lhs|, |rhs|) over pairs."""
    worst, arg = 0.0, None
    for s, t in pairs:
        lhs = bo_eval(m, ext_circle(m.rho, s, t))
        rhs = ext_circle(m.sigma, bo_eval(m, s), bo_eval(m, t))
        dev = abs(lhs - rhs) / max(1.0, abs(lhs), abs(rhs))
        if arg is None or dev > worst:
            worst, arg = dev, (s, t)
    passed = worst <= tol
    fails = [] if passed else [f"residual {worst:.3e} > {tol:g} at {arg}"]
    return Report("bo_hom_residual", passed,
                  {"max_residual": worst, "argmax": list(arg) if arg else None,
                   "pairs": len(pairs), "rho": str(m.rho), "sigma": str(m.sigma), "kappa": m.kappa},
                  fails)


def bo_cell_continuity(rho: ExtParam, t: float, kappa: float, sigma_eps: float) -> float:
    """|psi_{rho -> sigma_eps}(t) - psi_{rho -> 0}(t)|: continuity as sigma -> 0."""
    return abs(bo_eval(BoMap(rho, fin(sigma_eps), kappa), t) - bo_eval(BoMap(rho, ZERO, kappa), t))


def sample_domain(p: ExtParam, n: int, rng: np.random.Generator, spread: float = 1.5) -> np.ndarray:
    """n points of G_p(R) with additive coordinate uniform on [-spread, spread]."""
    a = rng.uniform(-spread, spread, size=n)
    if p.kind == "zero":
        return a
    if p.kind == "fin":
        return np.expm1(p.r * a) / p.r
    return np.exp(a)


ALL_PARAMS = (ZERO, fin(1.0), INF)
