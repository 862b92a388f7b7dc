"""Closed-form solvers for the regularized linear subproblem.

Each oracle solves ``min_u <g, u> + h(u)`` over its feasible set, where h is
the regularizer bundled with the set.  All solvers are deterministic: ties
break toward the lowest index, so repeated calls with equal inputs give
bitwise-equal outputs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import ClassVar

import numpy as np

Array = np.ndarray

# Clamp argument of log so entropy values stay finite at simplex vertices.
_LOG_FLOOR = 1e-300
_FEAS_TOL = 1e-9


class SubproblemError(ValueError):
    """Invalid subproblem input or a violated domain guard."""


def _check_gradient(g, dim: int) -> Array:
    g = np.asarray(g, dtype=float)
    if g.shape != (dim,):
        raise SubproblemError(f"gradient has shape {g.shape}, expected ({dim},)")
    if not np.all(np.isfinite(g)):
        raise SubproblemError("gradient contains NaN or Inf entries")
    return g


@dataclass(frozen=True, eq=False)
class CompositeLMO:
    """Regularizer h plus feasible set, with a closed-form subproblem solver.

    Subclasses provide ``solve`` (the exact minimizer of <g,u> + h(u)),
    value/subgradient access to h, the implied strong-convexity parameter
    ``mu``, set diameters, feasibility checks and a feasible-point sampler.
    """

    dim: int
    kind: ClassVar[str] = "abstract"

    def __post_init__(self):
        if self.dim < 1:
            raise SubproblemError("dimension must be a positive integer")

    # -- interface -------------------------------------------------------
    def solve(self, g) -> Array:
        raise NotImplementedError

    def h_value(self, u) -> float:
        raise NotImplementedError

    def h_subgrad(self, u) -> Array:
        raise NotImplementedError

    @property
    def mu(self) -> float:
        return 0.0

    def diameter(self, norm: str = "l2") -> float:
        raise NotImplementedError

    def contains(self, u, tol: float = _FEAS_TOL) -> bool:
        raise NotImplementedError

    def sample(self, rng: np.random.Generator) -> Array:
        raise NotImplementedError

    def params(self) -> dict:
        return {}

    # -- shared helpers --------------------------------------------------
    def objective(self, g, u) -> float:
        """Value of <g,u> + h(u); +inf outside the feasible set."""
        g = np.asarray(g, dtype=float)
        u = np.asarray(u, dtype=float)
        return float(g @ u) + self.h_value(u)

    def default_start(self) -> Array:
        raise NotImplementedError


class _SimplexSet(CompositeLMO):
    """Shared geometry for oracles living on the scaled standard simplex."""

    radius: float

    def _on_simplex(self, u, tol):
        u = np.asarray(u, dtype=float)
        if u.shape != (self.dim,):
            return False
        scale = max(1.0, self.radius)
        return bool(np.all(u >= -tol * scale) and abs(u.sum() - self.radius) <= tol * scale)

    def diameter(self, norm: str = "l2") -> float:
        # distance between two vertices r*e_i, r*e_j
        if norm == "l1":
            return 2.0 * self.radius
        return self.radius * math.sqrt(2.0)

    def sample(self, rng: np.random.Generator) -> Array:
        return rng.dirichlet(np.ones(self.dim)) * self.radius

    def default_start(self) -> Array:
        return np.full(self.dim, self.radius / self.dim)


@dataclass(frozen=True, eq=False)
class SimplexLinear(_SimplexSet):
    """h = 0 on the simplex {u >= 0, sum u = radius}; minimizer is a vertex."""

    radius: float = 1.0
    kind: ClassVar[str] = "simplex-linear"

    def __post_init__(self):
        super().__post_init__()
        if self.radius <= 0:
            raise SubproblemError("simplex radius must be positive")

    def solve(self, g) -> Array:
        g = _check_gradient(g, self.dim)
        u = np.zeros(self.dim)
        u[int(np.argmin(g))] = self.radius
        return u

    def h_value(self, u) -> float:
        return 0.0 if self.contains(u) else math.inf

    def h_subgrad(self, u) -> Array:
        return np.zeros(self.dim)

    def contains(self, u, tol: float = _FEAS_TOL) -> bool:
        return self._on_simplex(u, tol)

    def params(self) -> dict:
        return {"radius": self.radius}


@dataclass(frozen=True, eq=False)
class BoxLinear(CompositeLMO):
    """h = 0 on the box [lower, upper]; minimizer is a box corner."""

    lower: Array = None
    upper: Array = None
    kind: ClassVar[str] = "box-linear"

    def __post_init__(self):
        super().__post_init__()
        lower = np.broadcast_to(np.asarray(self.lower, dtype=float), (self.dim,)).copy()
        upper = np.broadcast_to(np.asarray(self.upper, dtype=float), (self.dim,)).copy()
        if not np.all(lower <= upper):
            raise SubproblemError("box must satisfy lower <= upper coordinatewise")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    def solve(self, g) -> Array:
        g = _check_gradient(g, self.dim)
        # g > 0 picks lower, g < 0 picks upper; g == 0 ties to lower
        return np.where(g < 0.0, self.upper, self.lower)

    def h_value(self, u) -> float:
        return 0.0 if self.contains(u) else math.inf

    def h_subgrad(self, u) -> Array:
        return np.zeros(self.dim)

    def diameter(self, norm: str = "l2") -> float:
        edge = self.upper - self.lower
        return float(np.sum(edge)) if norm == "l1" else float(np.linalg.norm(edge))

    def contains(self, u, tol: float = _FEAS_TOL) -> bool:
        u = np.asarray(u, dtype=float)
        if u.shape != (self.dim,):
            return False
        span = max(1.0, float(np.max(self.upper - self.lower)))
        return bool(np.all(u >= self.lower - tol * span) and np.all(u <= self.upper + tol * span))

    def sample(self, rng: np.random.Generator) -> Array:
        return rng.uniform(self.lower, self.upper)

    def default_start(self) -> Array:
        return 0.5 * (self.lower + self.upper)

    def params(self) -> dict:
        return {"lower": self.lower.tolist(), "upper": self.upper.tolist()}


@dataclass(frozen=True, eq=False)
class L1BallLinear(CompositeLMO):
    """h = 0 on the l1 ball of the given radius; minimizer is a signed vertex."""

    radius: float = 1.0
    kind: ClassVar[str] = "l1ball-linear"

    def __post_init__(self):
        super().__post_init__()
        if self.radius <= 0:
            raise SubproblemError("l1 ball radius must be positive")

    def solve(self, g) -> Array:
        g = _check_gradient(g, self.dim)
        u = np.zeros(self.dim)
        a = np.abs(g)
        if float(a.max()) == 0.0:
            return u  # every point ties; the origin is the canonical choice
        i = int(np.argmax(a))
        u[i] = -self.radius * math.copysign(1.0, g[i])
        return u

    def h_value(self, u) -> float:
        return 0.0 if self.contains(u) else math.inf

    def h_subgrad(self, u) -> Array:
        return np.zeros(self.dim)

    def diameter(self, norm: str = "l2") -> float:
        return 2.0 * self.radius

    def contains(self, u, tol: float = _FEAS_TOL) -> bool:
        u = np.asarray(u, dtype=float)
        if u.shape != (self.dim,):
            return False
        return bool(np.sum(np.abs(u)) <= self.radius * (1.0 + tol))

    def sample(self, rng: np.random.Generator) -> Array:
        w = rng.dirichlet(np.ones(self.dim))
        signs = rng.choice((-1.0, 1.0), size=self.dim)
        return self.radius * rng.uniform() * w * signs

    def default_start(self) -> Array:
        return np.zeros(self.dim)

    def params(self) -> dict:
        return {"radius": self.radius}


@dataclass(frozen=True, eq=False)
class BoxL1Reg(CompositeLMO):
    """h(u) = weight * ||u||_1 on a box; solved coordinatewise.

    Each coordinate minimizes the piecewise-linear g_i*t + weight*|t| over
    [lower_i, upper_i], so the minimum is at lower_i, 0 (when inside the
    interval) or upper_i.
    """

    lower: Array = None
    upper: Array = None
    weight: float = 1.0
    kind: ClassVar[str] = "box-l1reg"

    def __post_init__(self):
        super().__post_init__()
        lower = np.broadcast_to(np.asarray(self.lower, dtype=float), (self.dim,)).copy()
        upper = np.broadcast_to(np.asarray(self.upper, dtype=float), (self.dim,)).copy()
        if not np.all(lower <= upper):
            raise SubproblemError("box must satisfy lower <= upper coordinatewise")
        if self.weight < 0:
            raise SubproblemError("l1 weight must be nonnegative")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    def solve(self, g) -> Array:
        g = _check_gradient(g, self.dim)
        zero = np.clip(np.zeros(self.dim), self.lower, self.upper)
        candidates = np.stack([self.lower, zero, self.upper])  # tie order: lower, 0, upper
        objective = candidates * g + self.weight * np.abs(candidates)
        pick = np.argmin(objective, axis=0)
        return candidates[pick, np.arange(self.dim)]

    def h_value(self, u) -> float:
        if not self.contains(u):
            return math.inf
        return self.weight * float(np.sum(np.abs(u)))

    def h_subgrad(self, u) -> Array:
        return self.weight * np.sign(np.asarray(u, dtype=float))

    def diameter(self, norm: str = "l2") -> float:
        edge = self.upper - self.lower
        return float(np.sum(edge)) if norm == "l1" else float(np.linalg.norm(edge))

    def contains(self, u, tol: float = _FEAS_TOL) -> bool:
        u = np.asarray(u, dtype=float)
        if u.shape != (self.dim,):
            return False
        span = max(1.0, float(np.max(self.upper - self.lower)))
        return bool(np.all(u >= self.lower - tol * span) and np.all(u <= self.upper + tol * span))

    def sample(self, rng: np.random.Generator) -> Array:
        return rng.uniform(self.lower, self.upper)

    def default_start(self) -> Array:
        return np.clip(np.zeros(self.dim), self.lower, self.upper)

    def params(self) -> dict:
        return {"lower": self.lower.tolist(), "upper": self.upper.tolist(), "weight": self.weight}


@dataclass(frozen=True, eq=False)
class SimplexEntropy(_SimplexSet):
    """h(u) = scale * sum u_i log u_i on the simplex; minimizer is a softmax.

    Strongly convex with parameter scale/radius w.r.t. the l1 norm (hence
    also w.r.t. l2).  The softmax is computed with max-subtraction and log
    arguments are clamped so vertex evaluations stay finite.
    """

    radius: float = 1.0
    scale: float = 1.0
    kind: ClassVar[str] = "simplex-entropy"

    def __post_init__(self):
        super().__post_init__()
        if self.radius <= 0 or self.scale <= 0:
            raise SubproblemError("simplex radius and entropy scale must be positive")

    @property
    def mu(self) -> float:
        return self.scale / self.radius

    def solve(self, g) -> Array:
        g = _check_gradient(g, self.dim)
        z = -g / self.scale
        z = z - z.max()
        e = np.exp(z)
        return self.radius * e / e.sum()

    def h_value(self, u) -> float:
        if not self.contains(u):
            return math.inf
        u = np.asarray(u, dtype=float)
        return self.scale * float(np.sum(u * np.log(np.clip(u, _LOG_FLOOR, None))))

    def h_subgrad(self, u) -> Array:
        u = np.asarray(u, dtype=float)
        return self.scale * (np.log(np.clip(u, _LOG_FLOOR, None)) + 1.0)

    def contains(self, u, tol: float = _FEAS_TOL) -> bool:
        return self._on_simplex(u, tol)

    def params(self) -> dict:
        return {"radius": self.radius, "scale": self.scale}


@dataclass(frozen=True, eq=False)
class LpNormSquared(CompositeLMO):
    """h(u) = 0.5 * ||u||_p^2 for p in (1, 2], unconstrained by default.

    The unconstrained minimizer of <g,u> + h(u) is
    u_i = -sign(g_i) |g_i|^(q-1) ||g||_q^(2-q) with 1/p + 1/q = 1, and stays
    valid for any feasible set containing it.  An optional ball guard rejects
    solutions leaving a declared p-norm ball instead of guessing semantics.
    Strongly convex with parameter p - 1 w.r.t. the p-norm (hence also l2).
    """

    p: float = 2.0
    ball_radius: float | None = None
    kind: ClassVar[str] = "lpnorm-squared"

    def __post_init__(self):
        super().__post_init__()
        if not 1.0 < self.p <= 2.0:
            raise SubproblemError("p must lie in (1, 2]")
        if self.ball_radius is not None and self.ball_radius <= 0:
            raise SubproblemError("ball radius must be positive when given")

    @property
    def mu(self) -> float:
        return self.p - 1.0

    @property
    def q(self) -> float:
        return self.p / (self.p - 1.0)

    def solve(self, g) -> Array:
        g = _check_gradient(g, self.dim)
        a = np.abs(g)
        if float(a.max()) == 0.0:
            return np.zeros(self.dim)
        q = self.q
        norm_q = float(np.linalg.norm(g, ord=q))
        u = -np.sign(g) * a ** (q - 1.0) * norm_q ** (2.0 - q)
        if self.ball_radius is not None:
            if float(np.linalg.norm(u, ord=self.p)) > self.ball_radius * (1.0 + 1e-12):
                raise SubproblemError(
                    "unconstrained minimizer leaves the declared p-norm ball; "
                    "enlarge the ball or drop the constraint"
                )
        return u

    def h_value(self, u) -> float:
        u = np.asarray(u, dtype=float)
        norm_p = float(np.linalg.norm(u, ord=self.p))
        if self.ball_radius is not None and norm_p > self.ball_radius * (1.0 + _FEAS_TOL):
            return math.inf
        return 0.5 * norm_p**2

    def h_subgrad(self, u) -> Array:
        u = np.asarray(u, dtype=float)
        norm_p = float(np.linalg.norm(u, ord=self.p))
        if norm_p == 0.0:
            return np.zeros(self.dim)
        return norm_p ** (2.0 - self.p) * np.abs(u) ** (self.p - 1.0) * np.sign(u)

    def diameter(self, norm: str = "l2") -> float:
        if self.ball_radius is None:
            return math.inf
        return 2.0 * self.ball_radius

    def contains(self, u, tol: float = _FEAS_TOL) -> bool:
        u = np.asarray(u, dtype=float)
        if u.shape != (self.dim,):
            return False
        if self.ball_radius is None:
            return bool(np.all(np.isfinite(u)))
        return bool(np.linalg.norm(u, ord=self.p) <= self.ball_radius * (1.0 + tol))

    def sample(self, rng: np.random.Generator) -> Array:
        u = rng.standard_normal(self.dim)
        if self.ball_radius is not None:
            norm_p = float(np.linalg.norm(u, ord=self.p))
            u *= self.ball_radius * rng.uniform() / max(norm_p, 1e-30)
        return u

    def default_start(self) -> Array:
        return np.zeros(self.dim)

    def params(self) -> dict:
        out = {"p": self.p}
        if self.ball_radius is not None:
            out["ball_radius"] = self.ball_radius
        return out


_KINDS = {
    SimplexLinear.kind: SimplexLinear,
    BoxLinear.kind: BoxLinear,
    L1BallLinear.kind: L1BallLinear,
    BoxL1Reg.kind: BoxL1Reg,
    SimplexEntropy.kind: SimplexEntropy,
    LpNormSquared.kind: LpNormSquared,
}


def lmo_kinds() -> tuple[str, ...]:
    return tuple(sorted(_KINDS))


def make_lmo(kind: str, dim: int, **params) -> CompositeLMO:
    """Build a composite LMO by kind name; unknown kinds or params raise."""
    try:
        cls = _KINDS[kind]
    except KeyError:
        raise SubproblemError(f"unknown LMO kind {kind!r}; choose from {lmo_kinds()}") from None
    try:
        return cls(dim=dim, **params)
    except TypeError as exc:
        raise SubproblemError(f"bad parameters for LMO kind {kind!r}: {exc}") from None


# ---------------------------------------------------------------------------
# Brute-force verification oracle
# ---------------------------------------------------------------------------

_BRUTE_MAX_DIM = 4


def _simplex_grid(radius: float, dim: int, resolution: int) -> Array:
    steps = resolution - 1
    axes = np.meshgrid(*[np.arange(steps + 1)] * (dim - 1), indexing="ij")
    idx = np.stack([a.ravel() for a in axes], axis=1) if dim > 1 else np.zeros((1, 0), dtype=int)
    last = steps - idx.sum(axis=1)
    keep = last >= 0
    pts = np.concatenate([idx[keep], last[keep, None]], axis=1)
    return pts.astype(float) / steps * radius


def _box_grid(lower: Array, upper: Array, resolution: int) -> Array:
    axes = [np.linspace(lo, hi, resolution) for lo, hi in zip(lower, upper)]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def brute_force_grid(lmo: CompositeLMO, g, resolution: int) -> Array:
    """Feasibility-projected grid of candidate points for ``brute_force_solve``."""
    if lmo.dim > _BRUTE_MAX_DIM:
        raise SubproblemError(f"brute force limited to dimension <= {_BRUTE_MAX_DIM}")
    if resolution < 2:
        raise SubproblemError("resolution must be at least 2")
    if isinstance(lmo, _SimplexSet):
        return _simplex_grid(lmo.radius, lmo.dim, resolution)
    if isinstance(lmo, (BoxLinear, BoxL1Reg)):
        return _box_grid(lmo.lower, lmo.upper, resolution)
    if isinstance(lmo, L1BallLinear):
        pts = _box_grid(np.full(lmo.dim, -lmo.radius), np.full(lmo.dim, lmo.radius), resolution)
        return pts[np.abs(pts).sum(axis=1) <= lmo.radius * (1.0 + 1e-12)]
    if isinstance(lmo, LpNormSquared):
        g = np.asarray(g, dtype=float)
        extent = float(np.linalg.norm(g, ord=lmo.q)) if np.any(g != 0.0) else 0.0
        if lmo.ball_radius is not None:
            extent = min(extent, lmo.ball_radius)
        extent = max(extent, 1e-12)
        pts = _box_grid(np.full(lmo.dim, -extent), np.full(lmo.dim, extent), resolution)
        if lmo.ball_radius is not None:
            norms = np.linalg.norm(pts, ord=lmo.p, axis=1)
            pts = pts[norms <= lmo.ball_radius * (1.0 + 1e-12)]
        return pts
    raise SubproblemError(f"no brute-force grid for kind {lmo.kind!r}")


def _h_values_on_grid(lmo: CompositeLMO, pts: Array) -> Array:
    if isinstance(lmo, SimplexEntropy):
        return lmo.scale * np.sum(pts * np.log(np.clip(pts, _LOG_FLOOR, None)), axis=1)
    if isinstance(lmo, BoxL1Reg):
        return lmo.weight * np.sum(np.abs(pts), axis=1)
    if isinstance(lmo, LpNormSquared):
        return 0.5 * np.linalg.norm(pts, ord=lmo.p, axis=1) ** 2
    return np.zeros(len(pts))


def brute_force_solve(lmo: CompositeLMO, g, resolution: int) -> Array:
    """Grid minimizer of <g,u> + h(u); independent check of ``solve``.

    Only for dimension <= 4; the objective gap versus the closed form is
    bounded by the grid step times the objective's Lipschitz constant.
    """
    g = _check_gradient(g, lmo.dim)
    pts = brute_force_grid(lmo, g, resolution)
    objective = pts @ g + _h_values_on_grid(lmo, pts)
    return pts[int(np.argmin(objective))]
