"""Radial structure of G_rho: half-lines, sum witnesses, abelian subgroups.

A witness is an explicit o_rho word whose letters each sit on the half-line
<g>_rho of some generator g, and whose left-to-right product equals a given
linear combination of generators.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .core import PopaCtx, circle, commutator_defect, eta, inverse, is_member, rel_dev
from .errors import NoCase, NotCommutative, NullDirection, PopaError, ZeroDirection
from .report import Report

COMMUTE_TOL = 1e-10


def _is_zero_vec(x: np.ndarray) -> bool:
    return all(c == 0 for c in x)


@dataclass(frozen=True)
class HalfLine:
    """{t : t u in G_rho} as an open interval (lo, hi)."""

    u: np.ndarray
    lo: float | Fraction
    hi: float | Fraction

    def __contains__(self, t) -> bool:
        return self.lo < t < self.hi


def halfline(ctx: PopaCtx, u: np.ndarray) -> HalfLine:
    if _is_zero_vec(u):
        raise ZeroDirection("half-line of the zero vector")
    r = ctx.rho(u)
    if r > 0:
        return HalfLine(u, -1 / r, math.inf)
    if r < 0:
        return HalfLine(u, -math.inf, -1 / r)
    return HalfLine(u, -math.inf, math.inf)


def normalize_direction(ctx: PopaCtx, z: np.ndarray) -> np.ndarray:
    """z / rho(z), the point of <z> with rho = 1."""
    r = ctx.rho(z)
    if r == 0:
        raise NullDirection("rho(z) = 0: z has no unit representative")
    return z / r


# -- witnesses --------------------------------------------------------------

@dataclass
class Letter:
    element: np.ndarray
    base: np.ndarray        # generator whose half-line holds the letter
    scale: object           # element == scale * base
    note: str = ""


@dataclass
class Witness:
    word: list[Letter]
    target: np.ndarray
    steps: list[tuple[str, object]] = field(default_factory=list)  # (case tag, delta) per extension
    perm: tuple[int, ...] | None = None

    @property
    def case_tag(self) -> str | None:
        return self.steps[-1][0] if self.steps else None

    @property
    def delta(self):
        return self.steps[-1][1] if self.steps else None

    def evaluate(self, ctx: PopaCtx) -> np.ndarray:
        out = self.word[0].element
        for letter in self.word[1:]:
            out = circle(ctx, out, letter.element)
        return out

    def deviation(self, ctx: PopaCtx) -> float:
        """0 for an exact reproduction; relative deviation in the float kind."""
        got = self.evaluate(ctx)
        if ctx.exact:
            return 0.0 if all(a == b for a, b in zip(got, self.target)) else float(
                max(abs(a - b) for a, b in zip(got, self.target)))
        return rel_dev(got, self.target)

    def letters_on_halflines(self, ctx: PopaCtx) -> bool:
        for letter in self.word:
            if not is_member(ctx, letter.element):
                return False
            diff = letter.element - letter.scale * letter.base
            if ctx.exact:
                if not _is_zero_vec(diff):
                    return False
            elif rel_dev(letter.element, letter.scale * letter.base) > 1e-12:
                return False
        return True


def _extend(ctx: PopaCtx, s: np.ndarray, v: np.ndarray, base: np.ndarray, alpha) -> tuple[Letter, str, object]:
    """Letter x with s o x = s + v, where v = alpha * base.

    Case 1 (v a member): x = v / (1 + rho(s)).
    Case 2 (-v a member): x = delta * (-v)^{-1}, delta = (1 - rho(v)) / (1 + rho(s)).
    """
    es = eta(ctx, s)
    if is_member(ctx, v):
        x = v / es
        return Letter(x, base, alpha / es, "case1: v/(1+rho(u))"), "case1", None
    if is_member(ctx, -v):
        inv = inverse(ctx, -v)
        delta = (1 - ctx.rho(v)) / es
        x = delta * inv
        return Letter(x, base, alpha / es, "case2: delta*(-v)^-1"), "case2", delta
    raise NoCase("neither v nor -v is a member")


def sum_witness(ctx: PopaCtx, u: np.ndarray, v: np.ndarray) -> Witness:
    """Express u + v as a two-letter o_rho word.

    Requires u + v in G_rho and one summand a member; if u is not a member
    but v is, the roles are swapped (addition commutes). When both Case 1
    and Case 2 apply, Case 1 is used.
    """
    target = u + v
    if not is_member(ctx, target):
        raise NoCase("u + v is not a member")
    if not is_member(ctx, u):
        if not is_member(ctx, v):
            raise NoCase("neither summand is a member")
        u, v = v, u
    one = Fraction(1) if ctx.exact else 1.0
    letter, tag, delta = _extend(ctx, u, v, v, one)
    return Witness([Letter(u, u, one, "generator"), letter], target, [(tag, delta)])


def q_sum_witness(ctx: PopaCtx, u: np.ndarray, v: np.ndarray) -> Witness:
    """sum_witness restricted to rational data; every scalar stays in Q."""
    if not ctx.exact:
        raise PopaError("q_sum_witness needs an exact (rational) context")
    for x in (u, v):
        if x.dtype != object or not all(isinstance(c, Fraction) for c in x):
            raise PopaError("q_sum_witness needs rational coordinates")
    w = sum_witness(ctx, u, v)
    for letter in w.word:
        assert all(isinstance(c, Fraction) for c in letter.element)
    return w


def combination_witness(ctx: PopaCtx, gens: Sequence[np.ndarray], alphas: Sequence) -> Witness:
    """Word for alpha_1 g_1 + ... + alpha_n g_n (n-ary radial subgroups step).

    Summation order is the lexicographically first permutation whose
    partial sums are all members; each extension is a sum_witness step.
    """
    if len(gens) != len(alphas) or not gens:
        raise PopaError("need matching, non-empty generators and coefficients")
    terms = [a * g for a, g in zip(alphas, gens)]
    n = len(terms)
    for perm in itertools.permutations(range(n)):
        partial = terms[perm[0]]
        ok = is_member(ctx, partial)
        for i in perm[1:]:
            if not ok:
                break
            partial = partial + terms[i]
            ok = is_member(ctx, partial)
        if ok:
            break
    else:
        raise NoCase("no ordering of the summands keeps every partial sum in G_rho")

    first = perm[0]
    word = [Letter(terms[first], gens[first], alphas[first], "generator multiple")]
    steps = []
    s = terms[first]
    for i in perm[1:]:
        letter, tag, delta = _extend(ctx, s, terms[i], gens[i], alphas[i])
        word.append(letter)
        steps.append((tag, delta))
        s = s + terms[i]
    return Witness(word, s, steps, tuple(perm))


# -- abelian subgroups --------------------------------------------------------

@dataclass
class AbelianClass:
    kind: str                      # "null" or "ray"
    u: np.ndarray | None = None    # ray direction with rho(u) = 1
    eta_mult_dev: float = 0.0


def classify_abelian(ctx: PopaCtx, S: Sequence[np.ndarray], tol: float = COMMUTE_TOL) -> AbelianClass:
    """Decide which branch of the abelian dichotomy a commuting set falls in."""
    pts = list(S)
    for i, x in enumerate(pts):
        if not is_member(ctx, x):
            raise PopaError(f"element {i} is not a member")
    for i, j in itertools.combinations(range(len(pts)), 2):
        d = commutator_defect(ctx, pts[i], pts[j])
        if ctx.exact:
            bad = not _is_zero_vec(d)
        else:
            bad = float(np.max(np.abs(d))) > tol
        if bad:
            raise NotCommutative(f"rho(x)y != rho(y)x for elements {i}, {j}", pair=(i, j))

    rvals = [ctx.rho(x) for x in pts]
    nonzero = [i for i, r in enumerate(rvals) if (r != 0 if ctx.exact else abs(r) > tol)]
    if not nonzero:
        return AbelianClass("null")

    u = normalize_direction(ctx, pts[nonzero[0]])
    worst = 0.0
    for x, r in zip(pts, rvals):
        if ctx.exact:
            if not _is_zero_vec(x - r * u):
                raise NotCommutative("element off the common ray")
        elif rel_dev(x, r * u) > 1e-9:
            raise NotCommutative("element off the common ray")
    for x, y in itertools.combinations_with_replacement(pts, 2):
        lhs = eta(ctx, circle(ctx, x, y))
        rhs = eta(ctx, x) * eta(ctx, y)
        worst = max(worst, float(abs(lhs - rhs)) / max(1.0, float(abs(rhs))))
    return AbelianClass("ray", u, worst)


def commutes(ctx: PopaCtx, x: np.ndarray, y: np.ndarray, tol: float = COMMUTE_TOL) -> bool:
    d = commutator_defect(ctx, x, y)
    if ctx.exact:
        return _is_zero_vec(d)
    return float(np.max(np.abs(d))) <= tol


def scalar_iso_check(ctx: PopaCtx, u: np.ndarray, pairs: Sequence[tuple], tol: float = 1e-12) -> Report:
    """Check (s u) o (t u) = (s + t + s t rho(u)) u on each pair."""
    if _is_zero_vec(u):
        raise ZeroDirection("zero direction")
    r = ctx.rho(u)
    worst = 0.0
    failures = []
    for s, t in pairs:
        lhs = circle(ctx, s * u, t * u)
        rhs = (s + t + s * t * r) * u
        dev = (0.0 if _is_zero_vec(lhs - rhs) else float(max(abs(a - b) for a, b in zip(lhs, rhs)))) \
            if ctx.exact else rel_dev(lhs, rhs)
        if dev > (0.0 if ctx.exact else tol):
            failures.append(f"(s,t)=({s},{t}) deviation {dev:.3e}")
        worst = max(worst, dev)
    return Report("scalar_iso", not failures, {"max_deviation": worst, "pairs": len(pairs)}, failures)
