"""Composite problem model: smooth terms, regularizer handles, noise oracles.

A problem is ``psi(x) = f(x) + h(x)`` where f is smooth or weakly smooth
(Holder-continuous gradient with exponent nu and constant L_nu) and h is a
(strongly) convex regularizer owned by a composite LMO.  The catalog ships
test problems with certified constants covering every combination of
convexity, nu and strong convexity the solvers distinguish.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .subproblems import CompositeLMO, LpNormSquared, SimplexEntropy, SimplexLinear

Array = np.ndarray

NOISE_MODELS = ("gaussian-isotropic", "bounded-uniform")


class InfeasiblePointError(ValueError):
    """Raised when an oracle is evaluated outside the feasible set."""


class ProblemConfigError(ValueError):
    """Inconsistent problem declaration."""


# ---------------------------------------------------------------------------
# Norms
# ---------------------------------------------------------------------------

def vector_norm(v, kind: str = "l2") -> float:
    v = np.asarray(v, dtype=float)
    if kind == "l2":
        return float(np.linalg.norm(v))
    if kind == "l1":
        return float(np.sum(np.abs(v)))
    raise ProblemConfigError(f"unknown norm {kind!r}; use 'l2' or 'l1'")


def dual_norm(v, kind: str = "l2") -> float:
    """Norm of a gradient-space vector dual to ``vector_norm(., kind)``."""
    v = np.asarray(v, dtype=float)
    if kind == "l2":
        return float(np.linalg.norm(v))
    if kind == "l1":
        return float(np.max(np.abs(v))) if v.size else 0.0
    raise ProblemConfigError(f"unknown norm {kind!r}; use 'l2' or 'l1'")


# ---------------------------------------------------------------------------
# Problem specification
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ProblemSpec:
    """Oracle handles plus declared constants for one composite problem.

    Immutable after construction and safe to share across concurrent runs;
    the oracles themselves must be pure functions of their argument.
    """

    dim: int
    f_value: Callable[[Array], float]
    f_grad: Callable[[Array], Array]
    h_value: Callable[[Array], float]
    nu: float
    L_nu: float
    mu: float
    diameter: float  # math.inf when the feasible set is unbounded
    h_subgrad: Callable[[Array], Array] | None = None
    psi_star: float | None = None
    grad_bound: float | None = None
    subgrad_bound: float | None = None
    convex_f: bool = False
    norm: str = "l2"
    sample_feasible: Callable[[np.random.Generator], Array] | None = None
    name: str = "custom"

    def __post_init__(self):
        if self.dim < 1:
            raise ProblemConfigError("dim must be a positive integer")
        if not 0.0 < self.nu <= 1.0:
            raise ProblemConfigError("nu must lie in (0, 1]")
        if self.L_nu <= 0:
            raise ProblemConfigError("L_nu must be positive")
        if self.mu < 0:
            raise ProblemConfigError("mu must be nonnegative")
        if self.diameter <= 0:
            raise ProblemConfigError("diameter must be positive (inf for unbounded)")
        if self.norm not in ("l2", "l1"):
            raise ProblemConfigError("norm must be 'l2' or 'l1'")

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.diameter)


def eval_psi(spec: ProblemSpec, x) -> float:
    """f(x) + h(x); raises instead of returning NaN/inf for infeasible x."""
    x = np.asarray(x, dtype=float)
    hv = spec.h_value(x)
    if not math.isfinite(hv):
        raise InfeasiblePointError("h(x) is not finite: point lies outside the feasible set")
    return float(spec.f_value(x)) + hv


@dataclass(frozen=True)
class HolderReport:
    """Worst sampled gradient-growth ratio versus the declared constant."""

    worst_ratio: float
    declared: float
    nu: float
    violation: bool
    pairs: int


def check_holder(spec: ProblemSpec, samples: int, rng: np.random.Generator,
                 tol: float = 1e-9) -> HolderReport:
    """Sample feasible pairs and bound ||f'(y)-f'(x)|| / ||y-x||^nu.

    Advisory pre-flight only: solvers never consult it.  Degenerate pairs
    (x == y) are skipped.
    """
    if samples < 2:
        raise ProblemConfigError("need at least 2 samples")
    if spec.sample_feasible is None:
        raise ProblemConfigError("problem has no feasible-point sampler")
    worst = 0.0
    used = 0
    for _ in range(samples):
        x = spec.sample_feasible(rng)
        y = spec.sample_feasible(rng)
        dist = vector_norm(y - x, spec.norm)
        if dist == 0.0:
            continue
        num = dual_norm(spec.f_grad(y) - spec.f_grad(x), spec.norm)
        ratio = num / dist**spec.nu
        if ratio > worst:
            worst = ratio
        used += 1
    return HolderReport(
        worst_ratio=worst,
        declared=spec.L_nu,
        nu=spec.nu,
        violation=worst > spec.L_nu * (1.0 + tol),
        pairs=used,
    )


def check_gradient_consistency(spec: ProblemSpec, points: int, rng: np.random.Generator,
                               step: float = 1e-5) -> float:
    """Max relative error of central differences of f against f_grad."""
    if spec.sample_feasible is None:
        raise ProblemConfigError("problem has no feasible-point sampler")
    worst = 0.0
    for _ in range(points):
        x = spec.sample_feasible(rng)
        g = np.asarray(spec.f_grad(x), dtype=float)
        fd = np.zeros(spec.dim)
        for i in range(spec.dim):
            e = np.zeros(spec.dim)
            e[i] = step
            fd[i] = (spec.f_value(x + e) - spec.f_value(x - e)) / (2.0 * step)
        err = np.linalg.norm(fd - g) / max(1.0, np.linalg.norm(g))
        worst = max(worst, float(err))
    return worst


# ---------------------------------------------------------------------------
# Stochastic first-order oracle
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class StochasticOracle:
    """Unbiased noisy-gradient source with bounded second moment.

    Noise draws have mean zero and E||noise||^2 = sigma^2 regardless of the
    model.  Immutable; each consumer owns its own random stream, and equal
    seeds reproduce bit-identical draw sequences.
    """

    base: ProblemSpec
    sigma: float
    noise_model: str = "gaussian-isotropic"
    seed: int = 0

    def __post_init__(self):
        if self.sigma < 0:
            raise ProblemConfigError("sigma must be nonnegative")
        if self.noise_model not in NOISE_MODELS:
            raise ProblemConfigError(f"noise model must be one of {NOISE_MODELS}")

    def stream(self) -> np.random.Generator:
        return np.random.default_rng(np.random.SeedSequence(self.seed))


def _noise(oracle: StochasticOracle, shape, stream: np.random.Generator) -> Array:
    n = oracle.base.dim
    if oracle.noise_model == "gaussian-isotropic":
        # per-coordinate std sigma/sqrt(n) so the total second moment is sigma^2
        return stream.standard_normal(shape) * (oracle.sigma / math.sqrt(n))
    half_width = oracle.sigma * math.sqrt(3.0 / n)
    return stream.uniform(-half_width, half_width, shape)


def stochastic_grad(oracle: StochasticOracle, x, stream: np.random.Generator) -> Array:
    """One noisy gradient draw; exact gradient when sigma == 0."""
    x = np.asarray(x, dtype=float)
    if not math.isfinite(oracle.base.h_value(x)):
        raise InfeasiblePointError("stochastic oracle queried at an infeasible point")
    grad = np.asarray(oracle.base.f_grad(x), dtype=float)
    if oracle.sigma == 0.0:
        return grad
    return grad + _noise(oracle, x.shape, stream)


def minibatch_grad(oracle: StochasticOracle, x, b: int, stream: np.random.Generator) -> Array:
    """Mean of b independent draws; cuts the noise variance to sigma^2 / b."""
    if b < 1:
        raise ProblemConfigError("batch size must be a positive integer")
    x = np.asarray(x, dtype=float)
    if not math.isfinite(oracle.base.h_value(x)):
        raise InfeasiblePointError("stochastic oracle queried at an infeasible point")
    grad = np.asarray(oracle.base.f_grad(x), dtype=float)
    if oracle.sigma == 0.0:
        return grad
    return grad + _noise(oracle, (b, x.size), stream).mean(axis=0)


# ---------------------------------------------------------------------------
# Catalog of smooth terms
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SmoothTerm:
    """Differentiable part of a composite objective with certified constants."""

    dim: int
    value: Callable[[Array], float]
    grad: Callable[[Array], Array]
    nu: float
    L_nu: float
    convex: bool
    name: str
    meta: dict = field(default_factory=dict)


def power_iteration(mat: Array, iters: int = 500, rtol: float = 1e-13) -> float:
    """Dominant |eigenvalue| of a symmetric matrix, deterministic start."""
    n = mat.shape[0]
    v = np.ones(n) + np.linspace(0.0, 0.1, n)  # breaks symmetry deterministically
    v /= np.linalg.norm(v)
    prev = 0.0
    for _ in range(iters):
        w = mat @ v
        norm = float(np.linalg.norm(w))
        if norm == 0.0:
            return 0.0
        v = w / norm
        if abs(norm - prev) <= rtol * norm:
            break
        prev = norm
    return norm


def load_column_major(path: str, rows: int, cols: int) -> Array:
    """Read a plain-text numeric file as a column-major (rows, cols) matrix."""
    flat = np.loadtxt(path).ravel()
    if flat.size != rows * cols:
        raise ProblemConfigError(
            f"{path}: expected {rows * cols} numbers for a {rows}x{cols} matrix, got {flat.size}"
        )
    return flat.reshape((rows, cols), order="F")


def _as_vector(value, dim: int, what: str) -> Array:
    arr = np.asarray(value, dtype=float)
    if arr.ndim == 0:
        arr = np.full(dim, float(arr))
    if arr.shape != (dim,):
        raise ProblemConfigError(f"{what} must have length {dim}")
    return arr


def least_squares_term(dim: int, *, seed: int = 0, cond: float = 10.0, scale: float = 1.0,
                       matrix_file: str | None = None, rhs_file: str | None = None,
                       matrix: Array | None = None, rhs: Array | None = None) -> SmoothTerm:
    """f(x) = 0.5 ||A x - b||^2; smooth convex with L_1 = ||A^T A||_2."""
    if matrix_file is not None:
        matrix = load_column_major(matrix_file, dim, dim)
    if rhs_file is not None:
        rhs = np.loadtxt(rhs_file).ravel()
    if matrix is None:
        rng = np.random.default_rng(np.random.SeedSequence(seed))
        q, _ = np.linalg.qr(rng.standard_normal((dim, dim)))
        singular = np.linspace(1.0, math.sqrt(cond), dim)
        matrix = (q * singular) @ q.T * scale
    else:
        matrix = np.asarray(matrix, dtype=float)
    if rhs is None:
        rng = np.random.default_rng(np.random.SeedSequence(seed + 1))
        rhs = rng.standard_normal(dim)
    rhs = _as_vector(rhs, matrix.shape[0], "rhs")
    gram = matrix.T @ matrix
    lipschitz = power_iteration(gram) * (1.0 + 1e-9)

    def value(x, _a=matrix, _b=rhs):
        r = _a @ x - _b
        return 0.5 * float(r @ r)

    def grad(x, _a=matrix, _b=rhs):
        return _a.T @ (_a @ x - _b)

    return SmoothTerm(dim=dim, value=value, grad=grad, nu=1.0, L_nu=lipschitz,
                      convex=True, name="least-squares",
                      meta={"matrix": matrix, "rhs": rhs})


def indefinite_quadratic_term(dim: int, *, seed: int = 0, neg_fraction: float = 0.4,
                              scale: float = 1.0, diag=None, linear=None,
                              matrix_file: str | None = None,
                              linear_file: str | None = None) -> SmoothTerm:
    """f(x) = 0.5 x^T Q x + c^T x with an indefinite symmetric Q."""
    if matrix_file is not None:
        quad = load_column_major(matrix_file, dim, dim)
        quad = 0.5 * (quad + quad.T)
    elif diag is not None:
        quad = np.diag(_as_vector(diag, dim, "diag"))
    else:
        rng = np.random.default_rng(np.random.SeedSequence(seed))
        q, _ = np.linalg.qr(rng.standard_normal((dim, dim)))
        n_neg = max(1, int(round(neg_fraction * dim)))
        eigs = np.concatenate([-np.linspace(0.5, 1.0, n_neg), np.linspace(0.5, 1.0, dim - n_neg)])
        quad = (q * (eigs * scale)) @ q.T
    if linear_file is not None:
        lin = np.loadtxt(linear_file).ravel()
    elif linear is not None:
        lin = linear
    else:
        rng = np.random.default_rng(np.random.SeedSequence(seed + 1))
        lin = rng.standard_normal(dim) * scale
    lin = _as_vector(lin, dim, "linear")
    lipschitz = power_iteration(quad) * (1.0 + 1e-9)

    def value(x, _q=quad, _c=lin):
        return 0.5 * float(x @ (_q @ x)) + float(_c @ x)

    def grad(x, _q=quad, _c=lin):
        return _q @ x + _c

    return SmoothTerm(dim=dim, value=value, grad=grad, nu=1.0, L_nu=lipschitz,
                      convex=False, name="indefinite-quadratic",
                      meta={"matrix": quad, "linear": lin})


def weakly_smooth_term(dim: int, *, nu: float = 0.5, center=0.0, sign: float = 1.0,
                       name: str = "weakly-smooth") -> SmoothTerm:
    """f(x) = sign * ||x - c||^(1+nu) / (1+nu); Holder constant 2^(1-nu).

    sign > 0 gives the convex weakly smooth model; sign < 0 the concave
    (nonconvex) one, which must be paired with a strongly convex regularizer
    or a bounded set to keep the composite objective bounded below.
    """
    if not 0.0 < nu <= 1.0:
        raise ProblemConfigError("nu must lie in (0, 1]")
    if sign not in (-1.0, 1.0):
        raise ProblemConfigError("sign must be +1 or -1")
    centre = _as_vector(center, dim, "center")
    holder = 2.0 ** (1.0 - nu)

    def value(x, _c=centre, _nu=nu, _s=sign):
        return _s * float(np.linalg.norm(x - _c)) ** (1.0 + _nu) / (1.0 + _nu)

    def grad(x, _c=centre, _nu=nu, _s=sign):
        d = x - _c
        r = float(np.linalg.norm(d))
        if r == 0.0:
            return np.zeros_like(d)
        return _s * r ** (_nu - 1.0) * d

    return SmoothTerm(dim=dim, value=value, grad=grad, nu=nu, L_nu=holder,
                      convex=sign > 0, name=name, meta={"center": centre, "sign": sign})


def nearest_point_term(dim: int, *, target) -> SmoothTerm:
    """f(x) = 0.5 ||x - t||^2; smooth convex with L_1 = 1."""
    t = _as_vector(target, dim, "target")

    def value(x, _t=t):
        d = x - _t
        return 0.5 * float(d @ d)

    def grad(x, _t=t):
        return x - _t

    return SmoothTerm(dim=dim, value=value, grad=grad, nu=1.0, L_nu=1.0,
                      convex=True, name="nearest-point", meta={"target": t})


def linear_term(dim: int, *, coeffs=None, seed: int = 0, declared_l: float = 1.0) -> SmoothTerm:
    """f(x) = <c, x>; gradient is constant so any positive L is admissible."""
    if coeffs is None:
        rng = np.random.default_rng(np.random.SeedSequence(seed))
        coeffs = rng.standard_normal(dim)
    c = _as_vector(coeffs, dim, "coeffs")
    if declared_l <= 0:
        raise ProblemConfigError("declared_l must be positive")

    def value(x, _c=c):
        return float(_c @ x)

    def grad(x, _c=c):
        return _c.copy()

    return SmoothTerm(dim=dim, value=value, grad=grad, nu=1.0, L_nu=declared_l,
                      convex=True, name="linear", meta={"coeffs": c})


def _weakly_smooth_nonconvex(dim: int, **kw) -> SmoothTerm:
    kw.setdefault("name", "weakly-smooth-nonconvex")
    return weakly_smooth_term(dim, sign=-1.0, **kw)


CATALOG = {
    "least-squares": least_squares_term,
    "indefinite-quadratic": indefinite_quadratic_term,
    "weakly-smooth": weakly_smooth_term,
    "weakly-smooth-nonconvex": _weakly_smooth_nonconvex,
    "nearest-point": nearest_point_term,
    "linear": linear_term,
}


def make_smooth_term(problem_id: str, dim: int, **params) -> SmoothTerm:
    try:
        builder = CATALOG[problem_id]
    except KeyError:
        raise ProblemConfigError(
            f"unknown problem id {problem_id!r}; choose from {tuple(sorted(CATALOG))}"
        ) from None
    return builder(dim, **params)


# ---------------------------------------------------------------------------
# Assembly
# ---------------------------------------------------------------------------

def _logsumexp(z: Array) -> float:
    m = float(np.max(z))
    return m + math.log(float(np.sum(np.exp(z - m))))


def derive_psi_star(term: SmoothTerm, lmo: CompositeLMO) -> float | None:
    """Closed-form optimal value for the catalog pairs that admit one."""
    if term.name == "nearest-point" and isinstance(lmo, SimplexLinear):
        t = term.meta["target"]
        if lmo.contains(t, tol=1e-12):
            return 0.0
        return None
    if term.name in ("least-squares", "nearest-point") and isinstance(lmo, LpNormSquared):
        if lmo.p != 2.0 or lmo.ball_radius is not None:
            return None
        if term.name == "nearest-point":
            a = np.eye(term.dim)
            b = term.meta["target"]
        else:
            a = term.meta["matrix"]
            b = term.meta["rhs"]
        x_star = np.linalg.solve(a.T @ a + np.eye(term.dim), a.T @ b)
        r = a @ x_star - b
        return 0.5 * float(r @ r) + 0.5 * float(x_star @ x_star)
    if term.name == "linear" and isinstance(lmo, SimplexEntropy):
        c = term.meta["coeffs"]
        s, scale = lmo.radius, lmo.scale
        return -scale * s * _logsumexp(-c / scale) + scale * s * math.log(s)
    return None


def build_spec(term: SmoothTerm, lmo: CompositeLMO, *, norm: str = "l2",
               psi_star: float | None = None, grad_bound: float | None = None,
               subgrad_bound: float | None = None) -> ProblemSpec:
    """Assemble a ProblemSpec from a catalog smooth term and a composite LMO."""
    if term.dim != lmo.dim:
        raise ProblemConfigError(
            f"smooth term dimension {term.dim} does not match LMO dimension {lmo.dim}"
        )
    if psi_star is None:
        psi_star = derive_psi_star(term, lmo)
    return ProblemSpec(
        dim=term.dim,
        f_value=term.value,
        f_grad=term.grad,
        h_value=lmo.h_value,
        h_subgrad=lmo.h_subgrad,
        nu=term.nu,
        L_nu=term.L_nu,
        mu=lmo.mu,
        diameter=lmo.diameter(norm),
        psi_star=psi_star,
        grad_bound=grad_bound,
        subgrad_bound=subgrad_bound,
        convex_f=term.convex,
        norm=norm,
        sample_feasible=lmo.sample,
        name=term.name,
    )
