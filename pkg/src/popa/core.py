"""The circle group (G_rho(X), o_rho) on X = R^d.

Points are 1-D numpy arrays. The float kind uses float64; the exact kind
uses object arrays of ``fractions.Fraction`` so every group law can be
checked with equality. Which kind a context uses is fixed at construction.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionMismatch, NonMember, PopaError

MAX_DIM = 16
DEFAULT_EPS_MEM = 1e-12


def to_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, str):
        return Fraction(v.strip())
    if isinstance(v, (int, np.integer)):
        return Fraction(int(v))
    # floats convert exactly (binary expansion), never via repr
    return Fraction(float(v))


def vec(coords: Iterable, exact: bool = False) -> np.ndarray:
    """Build a point of R^d in the float or exact kind."""
    if exact:
        out = np.array([to_fraction(c) for c in coords], dtype=object)
    else:
        out = np.array([float(Fraction(c.strip())) if isinstance(c, str) else float(c)
                        for c in coords], dtype=np.float64)
        if not np.all(np.isfinite(out)):
            raise PopaError("non-finite coordinate")
    if out.ndim != 1 or out.size == 0:
        raise DimensionMismatch("a point needs at least one coordinate")
    return out


def is_exact(x: np.ndarray) -> bool:
    return x.dtype == object


class LinFunc:
    """Continuous linear functional on R^d, stored by its coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable, exact: bool = False):
        self.coeffs = vec(coeffs, exact)

    @property
    def dim(self) -> int:
        return self.coeffs.size

    @property
    def exact(self) -> bool:
        return is_exact(self.coeffs)

    def __call__(self, x):
        x = np.asarray(x) if not isinstance(x, np.ndarray) else x
        if x.shape[-1] != self.dim:
            raise DimensionMismatch(f"expected dimension {self.dim}, got {x.shape[-1]}")
        return x @ self.coeffs

    def is_zero(self, tol: float = 0.0) -> bool:
        if self.exact:
            return all(c == 0 for c in self.coeffs)
        return bool(np.max(np.abs(self.coeffs)) <= tol)

    def __repr__(self) -> str:
        return f"LinFunc({self.coeffs.tolist()})"


@dataclass(frozen=True, eq=False)
class PopaCtx:
    """The group G_rho(R^d) = {x : 1 + rho(x) > eps_mem}."""

    rho: LinFunc
    eps_mem: float | Fraction = DEFAULT_EPS_MEM

    def __post_init__(self):
        if not 1 <= self.rho.dim <= MAX_DIM:
            raise DimensionMismatch(f"dimension must be in 1..{MAX_DIM}, got {self.rho.dim}")
        if not 0 <= self.eps_mem < 1:
            raise PopaError("eps_mem must lie in [0, 1)")

    @classmethod
    def make(cls, rho: Iterable, exact: bool = False, eps_mem=None) -> "PopaCtx":
        if eps_mem is None:
            eps_mem = Fraction(0) if exact else DEFAULT_EPS_MEM
        elif exact:
            eps_mem = to_fraction(eps_mem)
        return cls(LinFunc(rho, exact=exact), eps_mem)

    @property
    def dim(self) -> int:
        return self.rho.dim

    @property
    def exact(self) -> bool:
        return self.rho.exact

    def point(self, coords: Iterable) -> np.ndarray:
        x = vec(coords, self.exact)
        _check_dim(self, x)
        return x

    def zero(self) -> np.ndarray:
        return self.point([0] * self.dim)


def _check_dim(ctx: PopaCtx, x: np.ndarray) -> None:
    if x.shape[-1] != ctx.dim:
        raise DimensionMismatch(f"expected dimension {ctx.dim}, got {x.shape[-1]}")


def eta(ctx: PopaCtx, x: np.ndarray):
    """eta_rho(x) = 1 + rho(x); returned even when x is not a member."""
    _check_dim(ctx, x)
    return 1 + ctx.rho(x)


def is_member(ctx: PopaCtx, x: np.ndarray) -> bool:
    return bool(eta(ctx, x) > ctx.eps_mem)


def require_member(ctx: PopaCtx, x: np.ndarray, what: str = "x") -> None:
    if not is_member(ctx, x):
        raise NonMember(f"{what} is outside G_rho (eta = {eta(ctx, x)})")


def circle(ctx: PopaCtx, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """x o_rho y = x + y + rho(x) y."""
    require_member(ctx, x, "x")
    require_member(ctx, y, "y")
    return x + y + ctx.rho(x) * y


def inverse(ctx: PopaCtx, x: np.ndarray) -> np.ndarray:
    """The two-sided inverse -x / (1 + rho(x))."""
    require_member(ctx, x)
    return -x / eta(ctx, x)


def commutator_defect(ctx: PopaCtx, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """x o y - y o x, which equals rho(x) y - rho(y) x."""
    return ctx.rho(x) * y - ctx.rho(y) * x


def power(ctx: PopaCtx, x: np.ndarray, n: int) -> np.ndarray:
    """n-fold circle product x o x o ... o x (n >= 0)."""
    out = ctx.zero()
    for _ in range(n):
        out = circle(ctx, out, x)
    return out


# -- vectorized float helpers (rows are points) ---------------------------

def eta_rows(ctx: PopaCtx, X: np.ndarray) -> np.ndarray:
    return 1.0 + X @ ctx.rho.coeffs


def circle_rows(ctx: PopaCtx, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Row-wise circle product without membership checks."""
    return X + Y + (X @ ctx.rho.coeffs)[:, None] * Y


def inverse_rows(ctx: PopaCtx, X: np.ndarray) -> np.ndarray:
    return -X / eta_rows(ctx, X)[:, None]


def rel_dev(a: np.ndarray, b: np.ndarray) -> float:
    """max_i |a_i - b_i| / max(1, |a_i|, |b_i|): absolute near zero, relative above 1."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    scale = np.maximum(1.0, np.maximum(np.abs(a), np.abs(b)))
    return float(np.max(np.abs(a - b) / scale)) if a.size else 0.0


# -- sampling -------------------------------------------------------------

def null_basis(coeffs: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Orthonormal basis (rows) of {x : coeffs . x = 0}."""
    c = np.asarray(coeffs, dtype=np.float64)
    d = c.size
    nrm = np.linalg.norm(c)
    if nrm <= tol:
        return np.eye(d)
    _, _, vt = np.linalg.svd(c.reshape(1, d))
    return vt[1:]


def unit_direction(ctx: PopaCtx) -> np.ndarray:
    """The minimum-norm u with rho(u) = 1 (requires rho != 0)."""
    c = ctx.rho.coeffs
    if ctx.exact:
        return c / sum(ci * ci for ci in c)
    return c / float(c @ c)


def random_members(ctx: PopaCtx, n: int, rng: np.random.Generator,
                   log_spread: float = 1.5, scale: float = 1.0) -> np.ndarray:
    """n float members with log eta uniform on [-log_spread, log_spread].

    The null-space component is Gaussian with standard deviation ``scale``.
    """
    d = ctx.dim
    c = np.asarray(ctx.rho.coeffs, dtype=np.float64)
    z = scale * rng.standard_normal((n, d))
    nn = float(c @ c)
    if nn == 0.0:
        return z
    z -= np.outer(z @ c, c) / nn
    target = np.exp(rng.uniform(-log_spread, log_spread, size=n))
    return z + np.outer(target - 1.0, c) / nn


def random_rational_members(ctx: PopaCtx, n: int, rng: np.random.Generator,
                            max_num: int = 9, max_den: int = 7) -> list[np.ndarray]:
    """n exact members with small random numerators and denominators."""
    out = []
    while len(out) < n:
        coords = [Fraction(int(rng.integers(-max_num, max_num + 1)),
                           int(rng.integers(1, max_den + 1))) for _ in range(ctx.dim)]
        x = np.array(coords, dtype=object)
        if is_member(ctx, x):
            out.append(x)
    return out


def random_rational_functional(d: int, rng: np.random.Generator,
                               max_num: int = 5, max_den: int = 4) -> list[Fraction]:
    return [Fraction(int(rng.integers(-max_num, max_num + 1)), int(rng.integers(1, max_den + 1)))
            for _ in range(d)]


def parse_vector(text: str, exact: bool = False) -> np.ndarray:
    """Parse "1,2.5,-3" (or "1/2,3" in exact mode) into a point."""
    parts: Sequence[str] = [p for p in text.split(",") if p.strip()]
    return vec(parts, exact)
