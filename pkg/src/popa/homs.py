"""Continuous homomorphisms K : G_rho(X) -> G_sigma(Y).

Five validated families are constructible:

    zero     K = 0
    linear   K(x) = M x                          with sigma(M x) = rho(x)
    power    K(x) = ((1 + rho(x))^gamma - 1) v   with sigma(v) = 1
    log      K(x) = log(1 + rho(x)) b            with sigma(b) = 0
    exp      K(x) = (e^{kap(x)} - 1) c           with sigma(c) = 1, rho = 0

The constraints are exactly what makes K(x o y) = K(x) o K(y) hold; the
residual sweep is the arbiter. ``classify_hom`` goes the other way: it
takes any callable, probes it, and fits one of the families.
"""
from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, ClassVar, Sequence

import numpy as np

from .core import (LinFunc, PopaCtx, circle_rows, is_member, null_basis, random_members,
                   rel_dev, unit_direction)
from .errors import (ConstraintViolation, InconsistentIndex, NonMember, NotCollinear,
                     NotHomomorphic, NotInjective, NotUnitDirection, NullDirection, PopaError,
                     Unvalidated, ZeroImage)
from .report import Report

LOG2 = math.log(2.0)
VALIDATE_TOL = 1e-10


def _f64(x) -> np.ndarray:
    return np.asarray(x, dtype=np.float64)


# -- specs ------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class HomSpec:
    family: ClassVar[str] = ""
    rho: LinFunc
    sigma: LinFunc

    @property
    def dim_x(self) -> int:
        return self.rho.dim

    @property
    def dim_y(self) -> int:
        return self.sigma.dim

    @property
    def ctx_x(self) -> PopaCtx:
        return PopaCtx(self.rho)

    @property
    def ctx_y(self) -> PopaCtx:
        return PopaCtx(self.sigma)

    def rows(self, X: np.ndarray) -> np.ndarray:
        """Formula applied row-wise; no membership or validation checks."""
        raise NotImplementedError

    def raw(self, x: np.ndarray) -> np.ndarray:
        return self.rows(_f64(x)[None, :])[0]

    def params(self) -> dict:
        return {}

    def constraints(self) -> dict[str, float]:
        """Name -> violation magnitude; all must be <= tolerance."""
        return {}

    def to_dict(self) -> dict:
        out = {"family": self.family, "rho": self.rho.coeffs.tolist(), "sigma": self.sigma.coeffs.tolist()}
        for k, v in self.params().items():
            out[k] = v.tolist() if isinstance(v, np.ndarray) else v
        return out

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return hom_eval(self, x)


@dataclass(frozen=True, eq=False)
class ZeroHom(HomSpec):
    family: ClassVar[str] = "zero"

    def rows(self, X):
        return np.zeros((X.shape[0], self.dim_y))


@dataclass(frozen=True, eq=False)
class LinearHom(HomSpec):
    family: ClassVar[str] = "linear"
    M: np.ndarray = None

    def rows(self, X):
        return X @ self.M.T

    def params(self):
        return {"M": self.M}

    def constraints(self):
        if not np.any(self.M):
            return {}
        return {"sigma(Mx) = rho(x)": float(np.max(np.abs(self.sigma.coeffs @ self.M - self.rho.coeffs)))}


@dataclass(frozen=True, eq=False)
class PowerHom(HomSpec):
    family: ClassVar[str] = "power"
    v: np.ndarray = None
    gamma: float = 1.0

    def rows(self, X):
        lg = np.log1p(X @ self.rho.coeffs)
        return np.expm1(self.gamma * lg)[:, None] * self.v

    def params(self):
        return {"v": self.v, "gamma": float(self.gamma)}

    def constraints(self):
        return {"sigma(v) = 1": abs(float(self.sigma(self.v)) - 1.0)}


@dataclass(frozen=True, eq=False)
class LogHom(HomSpec):
    family: ClassVar[str] = "log"
    b: np.ndarray = None

    def rows(self, X):
        return np.log1p(X @ self.rho.coeffs)[:, None] * self.b

    def params(self):
        return {"b": self.b}

    def constraints(self):
        return {"sigma(b) = 0": abs(float(self.sigma(self.b)))}


@dataclass(frozen=True, eq=False)
class ExpHom(HomSpec):
    family: ClassVar[str] = "exp"
    c: np.ndarray = None
    kap: LinFunc = None

    def rows(self, X):
        return np.expm1(X @ self.kap.coeffs)[:, None] * self.c

    def params(self):
        return {"c": self.c, "kap": self.kap.coeffs}

    def constraints(self):
        return {"sigma(c) = 1": abs(float(self.sigma(self.c)) - 1.0),
                "rho = 0": float(np.max(np.abs(self.rho.coeffs)))}


FAMILIES = {cls.family: cls for cls in (ZeroHom, LinearHom, PowerHom, LogHom, ExpHom)}


def spec_from_dict(d: dict) -> HomSpec:
    fam = d.get("family")
    if fam not in FAMILIES:
        raise PopaError(f"unknown family {fam!r}")
    rho, sigma = LinFunc(d["rho"]), LinFunc(d["sigma"])
    if fam == "zero":
        return ZeroHom(rho, sigma)
    if fam == "linear":
        M = _f64(d["M"])
        if M.shape != (sigma.dim, rho.dim):
            raise PopaError(f"M must be {sigma.dim}x{rho.dim}")
        return LinearHom(rho, sigma, M)
    if fam == "power":
        return PowerHom(rho, sigma, _vec_y(d["v"], sigma), float(d["gamma"]))
    if fam == "log":
        return LogHom(rho, sigma, _vec_y(d["b"], sigma))
    kap = LinFunc(d["kap"])
    if kap.dim != rho.dim:
        raise PopaError("kap must live on X")
    return ExpHom(rho, sigma, _vec_y(d["c"], sigma), kap)


def _vec_y(v, sigma: LinFunc) -> np.ndarray:
    out = _f64(v)
    if out.shape != (sigma.dim,):
        raise PopaError(f"vector must have dimension {sigma.dim}")
    return out


def hom_validate(spec: HomSpec, tol: float = VALIDATE_TOL) -> Report:
    viol = spec.constraints()
    failures = [f"{name}: violation {v:.3e}" for name, v in viol.items() if not v <= tol]
    return Report("hom_validate", not failures, {"family": spec.family, "violations": viol}, failures)


def hom_eval(spec: HomSpec, x: np.ndarray) -> np.ndarray:
    """Evaluate a validated spec at a member of G_rho(X)."""
    rep = hom_validate(spec)
    if not rep.passed:
        raise Unvalidated("; ".join(rep.failures))
    x = _f64(x)
    if not is_member(spec.ctx_x, x):
        raise NonMember("x is outside G_rho(X)")
    return spec.raw(x)


# -- constructors -----------------------------------------------------------

def construct_4a(rho: LinFunc, sigma: LinFunc, *, M=None, u=None, Ku=None, v=None, gamma=None,
                 b=None) -> HomSpec:
    """Homomorphism with K(N(rho)) inside N(sigma).

    Give either ``M`` (linear branch), ``v``/``gamma`` (power), ``b`` (log),
    or the radial data ``u``, ``Ku`` with rho(u) = 1: then tau = sigma(Ku)
    picks gamma = log(1 + tau)/log 2 and v = Ku/tau, with the tau = 0 limit
    giving the log family b = Ku/log 2.
    """
    if M is not None:
        spec = LinearHom(rho, sigma, _f64(M))
    elif u is not None:
        u, Ku = _f64(u), _f64(Ku)
        if abs(float(rho(u)) - 1.0) > VALIDATE_TOL:
            raise ConstraintViolation("radial data needs rho(u) = 1")
        tau = float(sigma(Ku))
        if tau <= -1.0:
            raise ConstraintViolation("K(u) must lie in G_sigma (sigma(K(u)) > -1)")
        if abs(tau) <= 1e-12:
            spec = LogHom(rho, sigma, Ku / LOG2)
        else:
            spec = PowerHom(rho, sigma, Ku / tau, math.log1p(tau) / LOG2)
    elif v is not None:
        spec = PowerHom(rho, sigma, _f64(v), float(gamma))
    elif b is not None:
        spec = LogHom(rho, sigma, _f64(b))
    else:
        raise PopaError("construct_4a needs M, (u, Ku), (v, gamma) or b")
    rep = hom_validate(spec)
    if not rep.passed:
        raise ConstraintViolation("; ".join(rep.failures))
    return spec


def construct_4b_exp(sigma: LinFunc, c, kap, rho: LinFunc | None = None) -> ExpHom:
    """Exp family on X with rho = 0: K(x) = (e^{kap(x)} - 1) c, sigma(c) = 1."""
    kap = kap if isinstance(kap, LinFunc) else LinFunc(kap)
    if rho is None:
        rho = LinFunc(np.zeros(kap.dim))
    spec = ExpHom(rho, sigma, _f64(c), kap)
    rep = hom_validate(spec)
    if not rep.passed:
        raise ConstraintViolation("; ".join(rep.failures))
    return spec


def literal_4b_map(rho: LinFunc, sigma: LinFunc, u, w, Ku, Kw) -> Callable[[np.ndarray], np.ndarray]:
    """The three-term mixed formula taken at face value, with K_0 = 0.

    X splits as <u> + V1 + V0 with V1 = <w>, V0 the orthogonal complement
    of w inside N(rho); kap_w is normalized so that K(w) = Kw. Used as a
    counterexample: for rho != 0 it is not a homomorphism.
    """
    u, w, Ku, Kw = map(_f64, (u, w, Ku, Kw))
    tau = float(sigma(Ku))
    expo = math.log1p(tau) / LOG2

    def K(x):
        x = _f64(x)
        r = float(rho(x))
        p = x - r * u
        t = float(p @ w) / float(w @ w)
        k1 = math.expm1(t * LOG2) * Kw          # K(pi_1 x)
        radial = math.expm1(expo * math.log1p(r)) / tau * Ku
        return k1 + (1.0 + float(sigma(k1))) * radial

    return K


# -- residual sweeps ------------------------------------------------------------

def _as_rows_fn(K) -> Callable[[np.ndarray], np.ndarray]:
    if isinstance(K, HomSpec):
        rep = hom_validate(K)
        if not rep.passed:
            raise Unvalidated("; ".join(rep.failures))
        return K.rows
    return lambda X: np.array([_f64(K(x)) for x in X])


def hom_residual(K, ctx_x: PopaCtx, ctx_y: PopaCtx, pairs, tol: float = 1e-9) -> Report:
    """Deviation of K(x o y) from K(x) o K(y) over member pairs.

    ``max_scaled`` divides each component by max(1, |lhs|, |rhs|) and is the
    pass criterion; ``max_abs`` is the raw componentwise deviation.
    """
    X, Y = _pairs_to_rows(pairs)
    f = _as_rows_fn(K)
    if X.shape[0] == 0:
        return Report("hom_residual", True, {"max_abs": 0.0, "max_scaled": 0.0, "pairs": 0})
    lhs = f(circle_rows(ctx_x, X, Y))
    KX, KY = f(X), f(Y)
    rhs = circle_rows(ctx_y, KX, KY)
    diff = np.abs(lhs - rhs)
    scaled = diff / np.maximum(1.0, np.maximum(np.abs(lhs), np.abs(rhs)))
    row_scaled = scaled.max(axis=1)
    i = int(np.argmax(row_scaled))
    max_scaled = float(row_scaled[i])
    max_abs = float(diff.max())
    image_ok = bool(np.all(1.0 + KX @ ctx_y.rho.coeffs > 0) and np.all(1.0 + KY @ ctx_y.rho.coeffs > 0))
    failures = []
    if not max_scaled <= tol:
        failures.append(f"residual {max_scaled:.3e} > {tol:g}")
    if not image_ok:
        failures.append("some images fall outside G_sigma(Y)")
    return Report("hom_residual", not failures,
                  {"max_abs": max_abs, "max_scaled": max_scaled, "pairs": int(X.shape[0]),
                   "argmax_pair": [X[i], Y[i]]}, failures)


def _pairs_to_rows(pairs):
    if isinstance(pairs, tuple) and len(pairs) == 2 and isinstance(pairs[0], np.ndarray) and pairs[0].ndim == 2:
        return _f64(pairs[0]), _f64(pairs[1])
    pairs = list(pairs)
    if not pairs:
        return np.zeros((0, 1)), np.zeros((0, 1))
    return np.array([_f64(p[0]) for p in pairs]), np.array([_f64(p[1]) for p in pairs])


def residual_sweep(K, ctx_x: PopaCtx, ctx_y: PopaCtx, n_pairs: int, seed: int, tol: float = 1e-9,
                   chunk: int = 2048, workers: int = 1, log_spread: float = 1.5) -> Report:
    """hom_residual over n_pairs seeded member pairs.

    Each fixed-size chunk draws from its own child of SeedSequence(seed) and
    chunk reports are reduced in chunk order, so the result does not depend
    on ``workers``.
    """
    n_chunks = max(1, -(-n_pairs // chunk))
    children = np.random.SeedSequence(seed).spawn(n_chunks)
    sizes = [min(chunk, n_pairs - i * chunk) for i in range(n_chunks)]

    def run(i):
        rng = np.random.default_rng(children[i])
        X = random_members(ctx_x, sizes[i], rng, log_spread)
        Y = random_members(ctx_x, sizes[i], rng, log_spread)
        return hom_residual(K, ctx_x, ctx_y, (X, Y), tol)

    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            reps = list(ex.map(run, range(n_chunks)))
    else:
        reps = [run(i) for i in range(n_chunks)]
    worst = max(reps, key=lambda r: r.metrics.get("max_scaled", 0.0))
    failures = [f for r in reps for f in r.failures]
    metrics = {"max_scaled": worst.metrics.get("max_scaled", 0.0),
               "max_abs": max(r.metrics.get("max_abs", 0.0) for r in reps),
               "argmax_pair": worst.metrics.get("argmax_pair"),
               "pairs": n_pairs, "chunks": n_chunks}
    return Report("residual_sweep", not failures, metrics, failures[:5], seed)


# -- radial indices -------------------------------------------------------------

def extract_gamma(K, ctx_x: PopaCtx, ctx_y: PopaCtx, x) -> float:
    """Additive index log(1 + sigma(K(x))) / log 2 for rho(x) != 0."""
    x = _f64(x)
    if float(ctx_x.rho(x)) == 0.0:
        raise NullDirection("extract_gamma needs rho(x) != 0")
    if not is_member(ctx_x, x):
        raise NonMember("x is outside G_rho(X)")
    return math.log1p(float(ctx_y.rho(_f64(K(x))))) / LOG2


def null_gamma(K, ctx_x: PopaCtx, ctx_y: PopaCtx, u) -> float:
    """Index log(1 + sigma(K(u))) on the null space; additive under +."""
    u = _f64(u)
    if abs(float(ctx_x.rho(u))) > VALIDATE_TOL:
        raise PopaError("null_gamma needs rho(u) = 0")
    return math.log1p(float(ctx_y.rho(_f64(K(u)))))


def radial_lambda(K, ctx_x: PopaCtx, ctx_y: PopaCtx, u, xi: float, tol: float = 1e-9) -> float:
    """Scalar lambda with K(xi u) = lambda K(u), for rho(u) = 0."""
    u = _f64(u)
    if abs(float(ctx_x.rho(u))) > VALIDATE_TOL:
        raise PopaError("radial_lambda needs rho(u) = 0")
    Ku = _f64(K(u))
    nu = float(Ku @ Ku)
    if nu <= 1e-24:
        raise ZeroImage("K(u) = 0")
    Kx = _f64(K(xi * u))
    lam = float(Kx @ Ku) / nu
    off = float(np.max(np.abs(Kx - lam * Ku)))
    if off > tol * max(1.0, float(np.max(np.abs(Kx)))):
        raise NotCollinear(f"K(xi u) leaves <K(u)> by {off:.3e}")
    return lam


def an_sequence(tau: float, n: int) -> list[float]:
    """a_1..a_n from a_1 = 1, a_{k+1} = 1 + (1 + tau) a_k."""
    if n < 1:
        raise PopaError("n must be >= 1")
    out = [1.0]
    for _ in range(n - 1):
        out.append(1.0 + (1.0 + tau) * out[-1])
    return out


def an_closed(tau: float, n: int) -> float:
    """((1 + tau)^n - 1) / tau, and n at tau = 0."""
    if tau == 0:
        return float(n)
    return math.expm1(n * math.log1p(tau)) / tau


# -- Chudziak decomposition ---------------------------------------------------------

def chudziak_split(K, ctx_x: PopaCtx, ctx_y: PopaCtx, u, points: np.ndarray,
                   scalars: np.ndarray | None = None, tol: float = 1e-9) -> Report:
    """Check A_u(x) = K(x - rho(x) u) and mu_u(t) = K((t - 1) u).

    Verifies A_u(x + y) = A_u(x) o A_u(y), mu_u(s t) = mu_u(s) o mu_u(t), and
    K(x) = A_u(x) o mu_u(1 + rho(x)), all in G_sigma(Y).
    """
    u = _f64(u)
    if abs(float(ctx_x.rho(u)) - 1.0) > VALIDATE_TOL:
        raise NotUnitDirection("chudziak_split needs rho(u) = 1")
    f = _as_rows_fn(K)
    P = _f64(points)
    r = P @ ctx_x.rho.coeffs

    def A(Z):
        return f(Z - np.outer(Z @ ctx_x.rho.coeffs, u))

    def mu(t):
        return f(np.outer(np.asarray(t) - 1.0, u))

    def sdev(a, b):
        return float(np.max(np.abs(a - b) / np.maximum(1.0, np.maximum(np.abs(a), np.abs(b)))))

    Q = np.roll(P, 1, axis=0)
    add_dev = sdev(A(P + Q), circle_rows(ctx_y, A(P), A(Q)))
    if scalars is None:
        scalars = np.exp(np.linspace(-1.5, 1.5, len(P)))
    s = _f64(scalars)
    t = np.roll(s, 1)
    mult_dev = sdev(mu(s * t), circle_rows(ctx_y, mu(s), mu(t)))
    rec_dev = sdev(f(P), circle_rows(ctx_y, A(P), mu(1.0 + r)))
    metrics = {"additivity": add_dev, "multiplicativity": mult_dev, "reconstruction": rec_dev,
               "points": len(P)}
    failures = [f"{k} deviation {v:.3e}" for k, v in metrics.items() if k != "points" and v > tol]
    return Report("chudziak_split", not failures, metrics, failures)


# -- null-space split and classification --------------------------------------------

@dataclass
class NullSplit:
    basis_V0: np.ndarray             # rows
    w: np.ndarray | None
    proj0: np.ndarray
    proj1: np.ndarray
    kap: np.ndarray                  # coefficients of log(1 + sigma(K(.))) on N(rho)


def _zero_tol(Kv: np.ndarray, zero_tol: float) -> float:
    return zero_tol * (1.0 + float(np.max(np.abs(Kv))))


def null_split(K, ctx_x: PopaCtx, ctx_y: PopaCtx, zero_tol: float = 1e-8) -> NullSplit:
    """Split N(rho) into V0 = N(rho) meet K^{-1}(N(sigma)) and a line <w>.

    On N(rho) the map nu -> log(1 + sigma(K(nu))) is linear; V0 is its
    kernel and w is rescaled so that sigma(K(w)) = 1.
    """
    N = null_basis(ctx_x.rho.coeffs)
    d = ctx_x.dim
    kvals = []
    for nu in N:
        Kn = _f64(K(nu))
        s = float(ctx_y.rho(Kn))
        kvals.append(0.0 if abs(s) <= _zero_tol(Kn, zero_tol) else math.log1p(s))
    kvec = N.T @ np.array(kvals) if len(N) else np.zeros(d)
    PN = N.T @ N if len(N) else np.zeros((d, d))
    nk = float(kvec @ kvec)
    if nk == 0.0:
        return NullSplit(N, None, PN, np.zeros((d, d)), kvec)
    w = kvec * (LOG2 / nk)
    proj1 = np.outer(kvec, kvec) / nk
    proj0 = PN - proj1
    # V0 basis: orthonormal complement of kvec inside N(rho)
    coords = N @ kvec
    comp = null_basis(coords) if len(N) > 1 else np.zeros((0, len(N)))
    basis0 = comp @ N if len(comp) else np.zeros((0, d))
    return NullSplit(basis0, w, proj0, proj1, kvec)


@dataclass
class ClassifiedHom:
    family: str
    params: dict
    spec: HomSpec
    fit_residual: float
    probe_log: list = field(default_factory=list)


def classify_hom(K, ctx_x: PopaCtx, ctx_y: PopaCtx, seed: int = 0, n_probe: int = 64,
                 hom_tol: float = 1e-8, zero_tol: float = 1e-8, gamma_tol: float = 1e-6,
                 linear_tol: float = 1e-8) -> ClassifiedHom:
    """Fit one of the five families to a black-box homomorphism."""
    rng = np.random.default_rng(seed)
    P = random_members(ctx_x, n_probe, rng, log_spread=1.0)
    Q = random_members(ctx_x, n_probe, rng, log_spread=1.0)
    log = []
    rep = hom_residual(K, ctx_x, ctx_y, (P, Q), tol=hom_tol)
    log.append({"step": "homomorphy", "max_scaled": rep.metrics["max_scaled"]})
    if not rep.passed:
        raise NotHomomorphic("; ".join(rep.failures))

    f = _as_rows_fn(K)
    KP = f(P)
    rho, sigma = ctx_x.rho, ctx_y.rho

    def finish(spec: HomSpec) -> ClassifiedHom:
        res = rel_dev(spec.rows(P), KP)
        log.append({"step": "fit", "family": spec.family, "residual": res})
        return ClassifiedHom(spec.family, spec.params(), spec, res, log)

    if float(np.max(np.abs(KP))) <= zero_tol:
        return finish(ZeroHom(rho, sigma))

    split = null_split(K, ctx_x, ctx_y, zero_tol)
    log.append({"step": "null_split", "kap": split.kap.tolist()})
    rho_zero = rho.is_zero()

    if split.w is not None:
        if not rho_zero:
            raise NotHomomorphic("sigma(K(N(rho))) != 0 with rho != 0: no continuous homomorphism has this form")
        c = _f64(K(split.w))
        c = c / math.expm1(float(split.kap @ split.w))
        return finish(ExpHom(rho, sigma, c, LinFunc(split.kap)))

    # K(N(rho)) inside N(sigma): linear, or power/log along a unit direction
    d = ctx_x.dim
    if rho_zero:
        M = f(np.eye(d)).T
        return finish(LinearHom(rho, sigma, M))
    u = unit_direction(ctx_x)
    B = np.vstack([null_basis(rho.coeffs), u])
    M = np.linalg.solve(B, f(B)).T
    lin_res = rel_dev(P @ M.T, KP)
    log.append({"step": "linear_fit", "residual": lin_res})
    if lin_res <= linear_tol:
        return finish(LinearHom(rho, sigma, M))

    lr = np.log1p(P @ rho.coeffs)
    sel = np.abs(lr) > 1e-3
    gam = np.log1p(KP[sel] @ sigma.coeffs) / lr[sel]
    spread = float(gam.max() - gam.min()) if gam.size else 0.0
    log.append({"step": "gamma", "min": float(gam.min()), "max": float(gam.max())})
    if spread > gamma_tol:
        raise InconsistentIndex(f"gamma estimates vary by {spread:.3e}")
    Ku = _f64(K(u))
    tau = float(sigma(Ku))
    if abs(tau) <= _zero_tol(Ku, zero_tol):
        return finish(LogHom(rho, sigma, Ku / LOG2))
    return finish(PowerHom(rho, sigma, Ku / tau, math.log1p(tau) / LOG2))


# -- sigma recovery from K and its auxiliary -------------------------------------------

@dataclass
class SigmaFit:
    sigma: LinFunc
    residual: float
    rank: int
    rank_deficient: bool


def corollary2_sigma_fit(K, g, samples: Sequence[np.ndarray]) -> SigmaFit:
    """Least-squares sigma with sigma(K(x_i)) = g(x_i) - 1.

    When the images do not span Y the minimum-norm solution is returned and
    ``rank_deficient`` is set.
    """
    S = [_f64(x) for x in samples]
    Ys = np.array([_f64(K(x)) for x in S])
    scale = max(1.0, float(np.max(np.abs(Ys))) if Ys.size else 1.0)
    for i, j in itertools.combinations(range(len(S)), 2):
        if float(np.max(np.abs(Ys[i] - Ys[j]))) <= 1e-12 * scale:
            raise NotInjective(f"samples {i} and {j} share an image")
    rhs = np.array([float(g(x)) - 1.0 for x in S])
    sol, _, rank, _ = np.linalg.lstsq(Ys, rhs, rcond=None)
    resid = float(np.max(np.abs(Ys @ sol - rhs))) if len(S) else 0.0
    return SigmaFit(LinFunc(sol), resid, int(rank), int(rank) < Ys.shape[1])


# -- random valid specs (for sweeps and round trips) ----------------------------------

def _random_unit_pair(d: int, rng) -> np.ndarray:
    v = rng.standard_normal(d)
    return v / np.linalg.norm(v)


def random_spec(family: str, dim_x: int, dim_y: int, rng: np.random.Generator) -> HomSpec:
    """A random spec of the family that satisfies its constraints."""
    sigma_c = rng.standard_normal(dim_y)
    sigma = LinFunc(sigma_c)
    ns = float(sigma_c @ sigma_c)
    if family == "exp":
        c = rng.standard_normal(dim_y)
        c += (1.0 - c @ sigma_c) * sigma_c / ns
        kap = 0.5 * rng.standard_normal(dim_x)
        return construct_4b_exp(sigma, c, kap)
    rho = LinFunc(rng.standard_normal(dim_x))
    if family == "zero":
        return ZeroHom(rho, sigma)
    if family == "linear":
        M0 = rng.standard_normal((dim_y, dim_x))
        M = M0 - np.outer(sigma_c, sigma_c @ M0) / ns + np.outer(sigma_c, rho.coeffs) / ns
        return construct_4a(rho, sigma, M=M)
    if family == "power":
        v = rng.standard_normal(dim_y)
        v += (1.0 - v @ sigma_c) * sigma_c / ns
        gamma = float(rng.choice([-1, 1]) * rng.uniform(0.3, 2.0))
        if abs(gamma - 1.0) < 0.05:
            gamma += 0.2
        return construct_4a(rho, sigma, v=v, gamma=gamma)
    if family == "log":
        if dim_y < 2:
            raise PopaError("a nonzero log spec needs dim_y >= 2 (sigma(b) = 0 forces b = 0 on a line)")
        b = rng.standard_normal(dim_y)
        b -= (b @ sigma_c) * sigma_c / ns
        return construct_4a(rho, sigma, b=b)
    raise PopaError(f"unknown family {family!r}")
