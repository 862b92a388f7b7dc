"""Conditional-gradient solvers for composite objectives.

Four variants share one iteration skeleton (gradient, regularized linear
subproblem, convex-combination step):

* ``run_cgt`` - adaptive or constant stepsizes chosen from the current gap;
* ``run_cgt_ls`` - backtracking stepsize search on the objective decrease,
  requiring no smoothness constants (h must be strongly convex);
* ``run_fcgt`` - two folded candidate steps per iteration, keeping the lower
  objective value; fully parameter-free schedules;
* ``run_rscgt`` - mini-batch stochastic gradients with a randomized
  stopping index drawn from a stepsize-weighted distribution.

Every run returns a :class:`RunTrace` whose rows carry both stationarity
measures, the stepsize accumulator and cumulative oracle counters.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .gaps import fw_gap, grad_map_norm
from .problems import ProblemSpec, StochasticOracle, eval_psi, minibatch_grad, vector_norm
from .subproblems import CompositeLMO

Array = np.ndarray

TRACE_COLUMNS = ("k", "alpha", "beta", "t_k", "g_k", "grad_map_norm", "psi",
                 "A_k", "grad_calls", "lmo_calls", "so_calls")

CGT_SCHEDULES = ("adaptive-convex-h", "adaptive-strongly-convex-h", "constant")

RSCGT_CASES = (
    "nonconvex-general",
    "convex-general",
    "nonconvex-strong",
    "convex-strong",
    "smooth-strong-nonconvex",
    "smooth-strong-convex",
)

LINE_SEARCH_TRIAL_CAP = 128


class SolverConfigError(ValueError):
    """Solver preconditions violated by the given problem/schedule."""


class SolverRuntimeError(RuntimeError):
    """Failure mid-run; carries the partial trace for post-mortem."""

    def __init__(self, message: str, trace: "RunTrace | None" = None):
        super().__init__(message)
        self.trace = trace


class LineSearchStallError(SolverRuntimeError):
    """Backtracking exceeded the hard trial cap (violated preconditions)."""


# ---------------------------------------------------------------------------
# Stepsize formulas and derived constants
# ---------------------------------------------------------------------------

def adaptive_alpha_bounded(gap: float, step_norm: float, nu: float, l_nu: float) -> float:
    """Gap-adaptive stepsize for bounded sets and merely convex h."""
    denom = gap + 4.0 * l_nu / (1.0 + nu) * step_norm ** (1.0 + nu)
    return (gap / denom) ** (1.0 / nu)


def adaptive_alpha_strong(gap: float, nu: float, l_nu: float, mu: float) -> float:
    """Gap-adaptive stepsize exploiting strong convexity of h."""
    head = gap ** ((1.0 - nu) / 2.0)
    denom = head + 4.0 * l_nu / (1.0 + nu) * (2.0 / mu) ** ((1.0 + nu) / 2.0)
    return (head / denom) ** (1.0 / nu)


def alpha_floor_bounded(epsilon: float, nu: float, l_nu: float, diameter: float) -> float:
    """Lower bound on the bounded-set adaptive stepsize while the gap exceeds epsilon."""
    denom = epsilon + 4.0 * l_nu / (1.0 + nu) * diameter ** (1.0 + nu)
    return (epsilon / denom) ** (1.0 / nu)


def alpha_floor_strong(epsilon: float, nu: float, l_nu: float, mu: float) -> float:
    """Lower bound on the strongly convex adaptive stepsize while the gap exceeds epsilon."""
    head = epsilon ** ((1.0 - nu) / 2.0)
    denom = head + 4.0 * l_nu / (1.0 + nu) * (2.0 / mu) ** ((1.0 + nu) / 2.0)
    return (head / denom) ** (1.0 / nu)


def smoothed_curvature(nu: float, l_nu: float, delta: float) -> float:
    """Effective curvature constant absorbed by the line-search slack delta."""
    if nu >= 1.0:
        return l_nu
    base = 2.0 * (1.0 + nu) * delta / (1.0 - nu)
    return (l_nu / base ** ((1.0 - nu) / 2.0)) ** (2.0 / (1.0 + nu))


def line_search_alpha_floor(nu: float, l_nu: float, mu: float, delta: float) -> float:
    """Stepsize below which the backtracking acceptance test always passes."""
    lhat = smoothed_curvature(nu, l_nu, delta)
    return (1.0 / (1.0 + lhat / mu)) ** ((1.0 + nu) / (2.0 * nu))


def line_search_trial_cap(alpha_floor: float, gamma: float) -> int:
    """Trials needed before gamma^t falls below the acceptance floor."""
    return max(1, math.ceil(math.log(alpha_floor) / math.log(gamma)))


def fold_alpha(k: int) -> float:
    """Aggressive folded schedule: 6/7 at k=1, then 6/(k+5)."""
    return 6.0 / 7.0 if k <= 1 else 6.0 / (k + 5.0)


def fold_beta(n_iters: int, q: float) -> float:
    """Conservative folded schedule, constant 1/(2 N^q) for a fixed budget."""
    return 1.0 / (2.0 * n_iters**q)


def fold_curvature(nu: float, l_nu: float, diameter: float) -> float:
    """Curvature-times-diameter constant governing the folded residual."""
    return l_nu * diameter ** (1.0 + nu) / (1.0 + nu)


def fold_curvature_strong(nu: float, l_nu: float, diameter: float, mu: float) -> float:
    """Strongly convex counterpart of the folded residual constant."""
    return l_nu * diameter**nu / (mu * (1.0 + nu))


def linear_budget(alpha_floor: float, psi_gap: float, epsilon: float) -> int:
    """Iteration budget 2/alpha * log(...) sufficient for geometric gap decay."""
    return math.ceil((2.0 / alpha_floor) * math.log(4.0 * psi_gap / (alpha_floor * epsilon)))


@dataclass(frozen=True)
class StepsizeSchedule:
    """Descriptor for the stepsize policy a deterministic run follows."""

    kind: str
    value: float | None = None  # constant schedules only

    def __post_init__(self):
        if self.kind not in CGT_SCHEDULES + ("line-search", "fcgt-folded", "rscgt-schedule"):
            raise SolverConfigError(f"unknown schedule kind {self.kind!r}")
        if self.kind == "constant":
            if self.value is None or not 0.0 < self.value <= 1.0:
                raise SolverConfigError("constant schedule needs a value in (0, 1]")

    @classmethod
    def adaptive_convex_h(cls) -> "StepsizeSchedule":
        return cls(kind="adaptive-convex-h")

    @classmethod
    def adaptive_strongly_convex_h(cls) -> "StepsizeSchedule":
        return cls(kind="adaptive-strongly-convex-h")

    @classmethod
    def constant(cls, value: float) -> "StepsizeSchedule":
        return cls(kind="constant", value=value)


# ---------------------------------------------------------------------------
# Trace machinery
# ---------------------------------------------------------------------------

@dataclass
class IterateRecord:
    """One monitored iteration: both gaps, step data and oracle counters."""

    k: int
    alpha: float
    beta: float
    trials: int
    gap: float
    map_norm: float
    psi: float
    acc: float
    grad_calls: int
    lmo_calls: int
    so_calls: int
    batch: int = 0
    branch: str | None = None
    y: Array | None = None
    x: Array | None = None


@dataclass
class RunTrace:
    """Complete record of one solver run."""

    algorithm: str
    records: list[IterateRecord]
    schedule_constants: dict
    outcome: str  # hit-epsilon | iteration-limit | error
    limit: str | None
    psi0: float
    x0: Array
    epsilon: float
    n_planned: int
    norm: str
    monitor_stride: int = 1
    sampled_index: int | None = None
    psi_evals: int = 0
    schedule: dict = field(default_factory=dict)

    def _column(self, name: str) -> Array:
        return np.array([getattr(r, name) for r in self.records], dtype=float)

    def ks(self) -> Array:
        return np.array([r.k for r in self.records], dtype=int)

    def gaps(self) -> Array:
        return self._column("gap")

    def alphas(self) -> Array:
        return self._column("alpha")

    def map_norms(self) -> Array:
        return self._column("map_norm")

    def psis(self) -> Array:
        return self._column("psi")

    def accs(self) -> Array:
        return self._column("acc")

    def min_so_far(self) -> Array:
        return np.minimum.accumulate(self.gaps())

    @property
    def iterations(self) -> int:
        return self.records[-1].k if self.records else 0

    @property
    def terminal_gap(self) -> float:
        return self.records[-1].gap if self.records else math.nan

    @property
    def min_gap(self) -> float:
        return float(self.gaps().min()) if self.records else math.nan

    @property
    def best_k(self) -> int | None:
        """Iteration index attaining the smallest monitored gap."""
        if not self.records:
            return None
        return int(self.records[int(np.argmin(self.gaps()))].k)

    @property
    def counters(self) -> dict:
        if not self.records:
            return {"grad_calls": 0, "lmo_calls": 0, "so_calls": 0, "psi_evals": self.psi_evals}
        last = self.records[-1]
        return {"grad_calls": last.grad_calls, "lmo_calls": last.lmo_calls,
                "so_calls": last.so_calls, "psi_evals": self.psi_evals}

    def write_csv(self, path) -> None:
        """Persist monitored rows; floats use repr so parsing round-trips."""
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(",".join(TRACE_COLUMNS) + "\n")
            for r in self.records:
                fields = (str(r.k), repr(r.alpha), repr(r.beta), str(r.trials),
                          repr(r.gap), repr(r.map_norm), repr(r.psi), repr(r.acc),
                          str(r.grad_calls), str(r.lmo_calls), str(r.so_calls))
                fh.write(",".join(fields) + "\n")


def read_trace_csv(path) -> dict[str, Array]:
    """Read a trace CSV back into column arrays keyed by header name."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        if header != list(TRACE_COLUMNS):
            raise ValueError(f"{path}: unexpected trace header {header}")
        body = fh.read().strip()
    if body:
        raw = np.array([[float(v) for v in line.split(",")] for line in body.splitlines()])
    else:
        raw = np.zeros((0, len(header)))
    return {name: raw[:, i] for i, name in enumerate(header)}


def _combine(y: Array, x: Array, a: float) -> Array:
    # single shared expression keeps deterministic/stochastic runs bitwise equal
    return (1.0 - a) * y + a * x


def _start_point(spec: ProblemSpec, x0) -> Array:
    y = np.array(x0, dtype=float)
    if y.shape != (spec.dim,):
        raise SolverConfigError(f"x0 has shape {y.shape}, expected ({spec.dim},)")
    eval_psi(spec, y)  # raises if infeasible
    return y


# ---------------------------------------------------------------------------
# Deterministic solvers
# ---------------------------------------------------------------------------

def run_cgt(spec: ProblemSpec, lmo: CompositeLMO, schedule: StepsizeSchedule, x0,
            n_iters: int, epsilon: float, *, wall_cap: float | None = None,
            store_vectors: bool = True) -> RunTrace:
    """Conditional-gradient run with adaptive or constant stepsizes.

    Per iteration: evaluate the gradient at the current point, solve the
    regularized linear subproblem once, measure both stationarity gaps, pick
    the stepsize from the measured gap, then take the convex-combination
    step.  Stops early when the gap falls to ``epsilon``.
    """
    if schedule.kind not in CGT_SCHEDULES:
        raise SolverConfigError(f"run_cgt accepts schedules {CGT_SCHEDULES}, got {schedule.kind!r}")
    if schedule.kind == "adaptive-strongly-convex-h" and spec.mu <= 0:
        raise SolverConfigError("adaptive-strongly-convex-h requires mu > 0")
    if schedule.kind == "adaptive-convex-h" and not spec.bounded:
        raise SolverConfigError("adaptive-convex-h requires a bounded feasible set")
    if n_iters < 1:
        raise SolverConfigError("iteration budget must be positive")
    if epsilon <= 0:
        raise SolverConfigError("epsilon must be positive")

    constants: dict = {"schedule": schedule.kind}
    if spec.bounded:
        constants["alpha_floor_bounded"] = alpha_floor_bounded(epsilon, spec.nu, spec.L_nu,
                                                               spec.diameter)
    if spec.mu > 0:
        constants["alpha_floor_strong"] = alpha_floor_strong(epsilon, spec.nu, spec.L_nu, spec.mu)
    if schedule.kind == "constant":
        constants["alpha_constant"] = schedule.value
    if spec.convex_f and spec.psi_star is not None:
        floor = constants.get("alpha_floor_strong") if schedule.kind == "adaptive-strongly-convex-h" \
            else constants.get("alpha_floor_bounded")
        if floor is not None:
            psi_gap = eval_psi(spec, np.asarray(x0, dtype=float)) - spec.psi_star
            if psi_gap > 0:
                constants["n_linear_budget"] = linear_budget(floor, psi_gap, epsilon)

    y = _start_point(spec, x0)
    records: list[IterateRecord] = []
    acc = 1.0
    grad_calls = lmo_calls = 0
    psi_prev = eval_psi(spec, y)
    psi0 = psi_prev
    outcome, limit = "iteration-limit", "iterations"
    started = time.monotonic()

    for k in range(1, n_iters + 1):
        grad = np.asarray(spec.f_grad(y), dtype=float)
        grad_calls += 1
        x = lmo.solve(grad)
        lmo_calls += 1
        gap = fw_gap(spec, y, grad, x)
        step_norm = grad_map_norm(y, x, spec.norm)
        if gap <= epsilon:
            records.append(IterateRecord(
                k=k, alpha=0.0, beta=0.0, trials=0, gap=gap, map_norm=step_norm,
                psi=psi_prev, acc=acc, grad_calls=grad_calls, lmo_calls=lmo_calls,
                so_calls=0, y=y.copy() if store_vectors else None,
                x=x.copy() if store_vectors else None))
            outcome, limit = "hit-epsilon", None
            break
        if schedule.kind == "adaptive-convex-h":
            alpha = adaptive_alpha_bounded(gap, step_norm, spec.nu, spec.L_nu)
        elif schedule.kind == "adaptive-strongly-convex-h":
            alpha = adaptive_alpha_strong(gap, spec.nu, spec.L_nu, spec.mu)
        else:
            alpha = schedule.value
        y = _combine(y, x, alpha)
        acc *= 1.0 - 0.5 * alpha
        psi_prev = eval_psi(spec, y)
        records.append(IterateRecord(
            k=k, alpha=alpha, beta=0.0, trials=0, gap=gap, map_norm=step_norm,
            psi=psi_prev, acc=acc, grad_calls=grad_calls, lmo_calls=lmo_calls,
            so_calls=0, y=y.copy() if store_vectors else None,
            x=x.copy() if store_vectors else None))
        if wall_cap is not None and time.monotonic() - started > wall_cap:
            outcome, limit = "iteration-limit", "wall-clock"
            break

    return RunTrace(algorithm="cgt", records=records, schedule_constants=constants,
                    outcome=outcome, limit=limit, psi0=psi0, x0=np.array(x0, dtype=float),
                    epsilon=epsilon, n_planned=n_iters, norm=spec.norm,
                    schedule={"kind": schedule.kind, "value": schedule.value})


def run_cgt_ls(spec: ProblemSpec, lmo: CompositeLMO, gamma: float, delta: float, x0,
               n_iters: int, epsilon: float, *, wall_cap: float | None = None,
               store_vectors: bool = True,
               trial_cap: int = LINE_SEARCH_TRIAL_CAP) -> RunTrace:
    """Conditional-gradient run with a backtracking stepsize search.

    The subproblem is solved once per iteration; each backtracking trial
    costs exactly one objective evaluation (billed via the ``t_k`` column).
    Convergence requires strongly convex h, but no smoothness constants.
    """
    if spec.mu <= 0:
        raise SolverConfigError("line-search variant requires mu > 0")
    if not 0.0 < gamma < 1.0:
        raise SolverConfigError("gamma must lie in (0, 1)")
    if delta <= 0:
        raise SolverConfigError("delta must be positive")
    if n_iters < 1:
        raise SolverConfigError("iteration budget must be positive")
    if epsilon <= 0:
        raise SolverConfigError("epsilon must be positive")

    lhat = smoothed_curvature(spec.nu, spec.L_nu, delta)
    afloor = line_search_alpha_floor(spec.nu, spec.L_nu, spec.mu, delta)
    constants = {
        "schedule": "line-search",
        "gamma": gamma,
        "delta": delta,
        "smoothed_curvature": lhat,
        "alpha_floor_line_search": afloor,
        "trial_cap_theory": line_search_trial_cap(afloor, gamma),
    }

    y = _start_point(spec, x0)
    records: list[IterateRecord] = []
    acc = 1.0
    grad_calls = lmo_calls = 0
    psi_prev = eval_psi(spec, y)
    psi0 = psi_prev
    psi_evals = 1
    outcome, limit = "iteration-limit", "iterations"
    started = time.monotonic()

    def _partial() -> RunTrace:
        return RunTrace(algorithm="cgt-ls", records=records, schedule_constants=constants,
                        outcome="error", limit=None, psi0=psi0, x0=np.array(x0, dtype=float),
                        epsilon=epsilon, n_planned=n_iters, norm=spec.norm,
                        psi_evals=psi_evals, schedule={"kind": "line-search",
                                                       "gamma": gamma, "delta": delta})

    for k in range(1, n_iters + 1):
        grad = np.asarray(spec.f_grad(y), dtype=float)
        grad_calls += 1
        x = lmo.solve(grad)
        lmo_calls += 1
        gap = fw_gap(spec, y, grad, x)
        step_norm = grad_map_norm(y, x, spec.norm)
        if gap <= epsilon:
            records.append(IterateRecord(
                k=k, alpha=0.0, beta=0.0, trials=0, gap=gap, map_norm=step_norm,
                psi=psi_prev, acc=acc, grad_calls=grad_calls, lmo_calls=lmo_calls,
                so_calls=0, y=y.copy() if store_vectors else None,
                x=x.copy() if store_vectors else None))
            outcome, limit = "hit-epsilon", None
            break
        trials = 0
        while True:
            trials += 1
            if trials > trial_cap:
                raise LineSearchStallError(
                    f"backtracking exceeded {trial_cap} trials at iteration {k}; "
                    "check that h is strongly convex", _partial())
            alpha = gamma**trials
            y_trial = _combine(y, x, alpha)
            psi_trial = eval_psi(spec, y_trial)
            psi_evals += 1
            if psi_trial <= psi_prev - alpha * gap + delta * alpha:
                break
        y = y_trial
        psi_prev = psi_trial
        acc *= 1.0 - 0.5 * alpha
        records.append(IterateRecord(
            k=k, alpha=alpha, beta=0.0, trials=trials, gap=gap, map_norm=step_norm,
            psi=psi_prev, acc=acc, grad_calls=grad_calls, lmo_calls=lmo_calls,
            so_calls=0, y=y.copy() if store_vectors else None,
            x=x.copy() if store_vectors else None))
        if wall_cap is not None and time.monotonic() - started > wall_cap:
            outcome, limit = "iteration-limit", "wall-clock"
            break

    return RunTrace(algorithm="cgt-ls", records=records, schedule_constants=constants,
                    outcome=outcome, limit=limit, psi0=psi0, x0=np.array(x0, dtype=float),
                    epsilon=epsilon, n_planned=n_iters, norm=spec.norm, psi_evals=psi_evals,
                    schedule={"kind": "line-search", "gamma": gamma, "delta": delta})


def run_fcgt(spec: ProblemSpec, lmo: CompositeLMO, q: float, x0, n_iters: int,
             epsilon: float, *, wall_cap: float | None = None,
             store_vectors: bool = True) -> RunTrace:
    """Folded conditional-gradient run; no problem constants required.

    Each iteration forms two candidate steps with schedules 6/(k+5) and the
    constant 1/(2 N^q) and keeps whichever has the smaller objective (ties
    keep the first).  Needs a bounded feasible set and the budget fixed in
    advance, since the conservative stepsize depends on N.
    """
    if not spec.bounded:
        raise SolverConfigError("folded variant requires a bounded feasible set")
    if not 0.0 < q < 1.0:
        raise SolverConfigError("q must lie in (0, 1)")
    if n_iters < 1:
        raise SolverConfigError("iteration budget must be positive")
    if epsilon <= 0:
        raise SolverConfigError("epsilon must be positive")

    beta = fold_beta(n_iters, q)
    constants = {
        "schedule": "fcgt-folded",
        "q": q,
        "beta": beta,
        "fold_curvature": fold_curvature(spec.nu, spec.L_nu, spec.diameter),
    }
    if spec.mu > 0:
        constants["fold_curvature_strong"] = fold_curvature_strong(
            spec.nu, spec.L_nu, spec.diameter, spec.mu)

    y = _start_point(spec, x0)
    records: list[IterateRecord] = []
    acc = 1.0
    grad_calls = lmo_calls = 0
    psi_prev = eval_psi(spec, y)
    psi0 = psi_prev
    psi_evals = 1
    outcome, limit = "iteration-limit", "iterations"
    started = time.monotonic()

    for k in range(1, n_iters + 1):
        grad = np.asarray(spec.f_grad(y), dtype=float)
        grad_calls += 1
        x = lmo.solve(grad)
        lmo_calls += 1
        gap = fw_gap(spec, y, grad, x)
        step_norm = grad_map_norm(y, x, spec.norm)
        if gap <= epsilon:
            records.append(IterateRecord(
                k=k, alpha=0.0, beta=beta, trials=0, gap=gap, map_norm=step_norm,
                psi=psi_prev, acc=acc, grad_calls=grad_calls, lmo_calls=lmo_calls,
                so_calls=0, y=y.copy() if store_vectors else None,
                x=x.copy() if store_vectors else None))
            outcome, limit = "hit-epsilon", None
            break
        alpha = fold_alpha(k)
        y_hat = _combine(y, x, alpha)
        y_til = _combine(y, x, beta)
        psi_hat = eval_psi(spec, y_hat)
        psi_til = eval_psi(spec, y_til)
        psi_evals += 2
        if psi_hat <= psi_til:
            y, psi_prev, branch = y_hat, psi_hat, "alpha"
        else:
            y, psi_prev, branch = y_til, psi_til, "beta"
        acc *= 1.0 - 0.5 * alpha
        records.append(IterateRecord(
            k=k, alpha=alpha, beta=beta, trials=0, gap=gap, map_norm=step_norm,
            psi=psi_prev, acc=acc, grad_calls=grad_calls, lmo_calls=lmo_calls,
            so_calls=0, branch=branch, y=y.copy() if store_vectors else None,
            x=x.copy() if store_vectors else None))
        if wall_cap is not None and time.monotonic() - started > wall_cap:
            outcome, limit = "iteration-limit", "wall-clock"
            break

    return RunTrace(algorithm="fcgt", records=records, schedule_constants=constants,
                    outcome=outcome, limit=limit, psi0=psi0, x0=np.array(x0, dtype=float),
                    epsilon=epsilon, n_planned=n_iters, norm=spec.norm, psi_evals=psi_evals,
                    schedule={"kind": "fcgt-folded", "q": q})


# ---------------------------------------------------------------------------
# Randomized stochastic solver
# ---------------------------------------------------------------------------

def sample_r(weights, stream: np.random.Generator) -> int:
    """Draw a 1-based index with probability proportional to the weights."""
    w = np.asarray(weights, dtype=float)
    if w.size == 0:
        raise SolverConfigError("weights must be nonempty")
    if not np.all(np.isfinite(w)) or np.any(w <= 0.0):
        raise SolverConfigError("weights must be positive and finite")
    cum = np.cumsum(w)
    target = stream.random() * cum[-1]
    return int(np.searchsorted(cum, target, side="right")) + 1


@dataclass(frozen=True)
class RscgtPlan:
    """Schedule derived from one of the randomized-run parameter cases."""

    case: str
    n_iters: int
    alphas: Array
    batches: np.ndarray
    pmf: Array
    constants: dict
    warnings: tuple[str, ...] = ()


def _fold_alphas(n: int) -> Array:
    return np.array([fold_alpha(k) for k in range(1, n + 1)])


def _pmf_from_alphas(alphas: Array, weight_by_acc: bool) -> Array:
    if weight_by_acc:
        log_acc = np.cumsum(np.log1p(-alphas / 2.0))
        log_w = np.log(alphas) - log_acc
        w = np.exp(log_w - log_w.max())
    else:
        w = alphas.copy()
    return w / w.sum()


def plan_rscgt(case: str, spec: ProblemSpec, sigma: float, epsilon: float, *,
               psi_gap: float | None = None, d_f_x: float | None = None,
               n_override: int | None = None) -> RscgtPlan:
    """Derive (N, stepsizes, batch sizes, stopping PMF) for a parameter case.

    ``psi_gap`` is an upper bound on psi(x0) - psi*; cases whose budgets
    need it reject configs that do not declare or derive one.  All checks
    run before any oracle call.
    """
    if case not in RSCGT_CASES:
        raise SolverConfigError(f"unknown case {case!r}; choose from {RSCGT_CASES}")
    if epsilon <= 0:
        raise SolverConfigError("epsilon must be positive")
    if sigma < 0:
        raise SolverConfigError("sigma must be nonnegative")
    nu, l_nu, mu, diam = spec.nu, spec.L_nu, spec.mu, spec.diameter
    warnings: list[str] = []
    constants: dict = {"case": case, "sigma": sigma, "epsilon": epsilon}

    needs_bounded = case in ("nonconvex-general", "convex-general",
                             "nonconvex-strong", "convex-strong")
    if needs_bounded and not spec.bounded:
        raise SolverConfigError(f"case {case!r} requires a bounded feasible set")
    if case.endswith("strong") or case.startswith("smooth"):
        if mu <= 0:
            raise SolverConfigError(f"case {case!r} requires mu > 0")
    if case.startswith("smooth") and nu != 1.0:
        raise SolverConfigError(f"case {case!r} requires nu = 1")
    if case in ("convex-general", "convex-strong", "smooth-strong-convex") and not spec.convex_f:
        raise SolverConfigError(f"case {case!r} requires f declared convex")

    def _need_psi_gap() -> float:
        if psi_gap is None:
            raise SolverConfigError(f"case {case!r} needs a declared bound on psi(x0) - psi*")
        if psi_gap <= 0:
            raise SolverConfigError("psi_gap must be positive")
        return psi_gap

    if case == "nonconvex-general":
        if d_f_x is None:
            if psi_gap is None:
                raise SolverConfigError(
                    "nonconvex-general needs d_f_x declared or derivable from psi_gap")
            d_f_x = psi_gap + 2.0 * l_nu * diam**2 / (1.0 + nu)
        if diam < 1.0:
            warnings.append("diameter below 1: outside the stated hypotheses of this case")
        n_theory = math.ceil((2.0 * d_f_x / epsilon) ** ((1.0 + nu) / nu))
        n = n_override or n_theory
        alpha = 1.0 / n ** (1.0 / (1.0 + nu))
        batch = max(1, math.ceil((1.0 + nu) * sigma**2 * d_f_x / (l_nu * epsilon**2)))
        alphas = np.full(n, alpha)
        batches = np.full(n, batch, dtype=int)
        pmf = _pmf_from_alphas(alphas, weight_by_acc=False)
        constants.update(n_theory=n_theory, n_label="N0", alpha_constant=alpha,
                         batch_constant=batch, d_f_x=d_f_x)
    elif case == "convex-general":
        n_theory = math.ceil(4.0 * (216.0 * l_nu * diam**2 / ((1.0 + nu) * epsilon)) ** (1.0 / nu))
        n = n_override or n_theory
        alphas = _fold_alphas(n)
        ks = np.arange(1, n + 1)
        raw = ((1.0 + nu) * sigma * (ks + 3.0) ** nu / (2.0 ** (2.0 * nu + 1.5) * l_nu * diam)) ** 2
        batches = np.maximum(1, np.ceil(raw)).astype(int)
        pmf = _pmf_from_alphas(alphas, weight_by_acc=True)
        constants.update(n_theory=n_theory, n_label="N1", batch_max=int(batches.max()))
    elif case == "nonconvex-strong":
        gap0 = _need_psi_gap()
        c_strong = fold_curvature_strong(nu, l_nu, diam, mu)
        inner = (14.0 / (3.0 * epsilon)) * (gap0 / 3.0 + mu * (6.0**nu * c_strong / 7.0**nu) ** 2)
        n_theory = math.ceil(inner ** ((1.0 + 2.0 * nu) / (2.0 * nu)))
        n = n_override or n_theory
        alpha = 6.0 / (7.0 * n ** (1.0 / (1.0 + 2.0 * nu)))
        batch = max(1, math.ceil(2.0 * sigma**2 / (mu * epsilon)))
        alphas = np.full(n, alpha)
        batches = np.full(n, batch, dtype=int)
        pmf = _pmf_from_alphas(alphas, weight_by_acc=False)
        constants.update(n_theory=n_theory, n_label="N2", alpha_constant=alpha,
                         batch_constant=batch, fold_curvature_strong=c_strong)
    elif case == "convex-strong":
        c_strong = fold_curvature_strong(nu, l_nu, diam, mu)
        n_theory = math.ceil((56.0 * 36.0**nu * mu * c_strong**2 / epsilon) ** (1.0 / (2.0 * nu)))
        n = n_override or n_theory
        alphas = _fold_alphas(n)
        batch = max(1, math.ceil(2.0 * sigma**2 / (mu * epsilon)))
        batches = np.full(n, batch, dtype=int)
        pmf = _pmf_from_alphas(alphas, weight_by_acc=True)
        constants.update(n_theory=n_theory, n_label="N3", batch_constant=batch,
                         fold_curvature_strong=c_strong)
    elif case == "smooth-strong-nonconvex":
        gap0 = _need_psi_gap()
        abar = mu / (l_nu + mu)
        n_theory = math.ceil(4.0 * (mu + l_nu) * gap0 / (3.0 * mu * epsilon))
        n = n_override or n_theory
        batch = max(1, math.ceil(2.0 * sigma**2 / (mu * epsilon)))
        alphas = np.full(n, abar)
        batches = np.full(n, batch, dtype=int)
        pmf = _pmf_from_alphas(alphas, weight_by_acc=False)
        constants.update(n_theory=n_theory, n_label="N4", alpha_bar=abar, batch_constant=batch)
    else:  # smooth-strong-convex
        gap0 = _need_psi_gap()
        abar = mu / (l_nu + mu)
        n_theory = math.ceil((2.0 * (mu + l_nu) / mu)
                             * math.log(4.0 * (mu + l_nu) * gap0 / (mu * epsilon)))
        n_theory = max(1, n_theory)
        n = n_override or n_theory
        batch = max(1, math.ceil(2.0 * sigma**2 / (mu * epsilon)))
        alphas = np.full(n, abar)
        batches = np.full(n, batch, dtype=int)
        pmf = _pmf_from_alphas(alphas, weight_by_acc=True)
        constants.update(n_theory=n_theory, n_label="N5", alpha_bar=abar, batch_constant=batch)

    constants["n_planned"] = int(len(alphas))
    constants["so_calls_planned"] = int(batches.sum())
    return RscgtPlan(case=case, n_iters=int(len(alphas)), alphas=alphas, batches=batches,
                     pmf=pmf, constants=constants, warnings=tuple(warnings))


def run_rscgt(spec: ProblemSpec, oracle: StochasticOracle, lmo: CompositeLMO, case: str,
              epsilon: float, seed, *, x0=None, psi_gap: float | None = None,
              d_f_x: float | None = None, n_override: int | None = None,
              monitor_stride: int = 1, store_vectors: bool = True) -> RunTrace:
    """Randomized mini-batch conditional-gradient run.

    The stopping index R is drawn up front from the case's stepsize-weighted
    distribution, then exactly R iterations run on mini-batch gradients.
    The gap recorded in the trace is instrumentation computed with the true
    gradient every ``monitor_stride`` iterations (and always at k = R); it
    is never fed back into the algorithm and is excluded from the oracle
    counters.  ``x0`` defaults to the LMO's canonical start.
    """
    if monitor_stride < 1:
        raise SolverConfigError("monitor_stride must be a positive integer")
    plan = plan_rscgt(case, spec, oracle.sigma, epsilon,
                      psi_gap=psi_gap, d_f_x=d_f_x, n_override=n_override)
    seed_seq = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    r_seed, noise_seed = seed_seq.spawn(2)
    stop_index = sample_r(plan.pmf, np.random.default_rng(r_seed))
    noise_stream = np.random.default_rng(noise_seed)

    y = _start_point(spec, lmo.default_start() if x0 is None else x0)
    x_start = y.copy()
    records: list[IterateRecord] = []
    acc = 1.0
    lmo_calls = so_calls = 0
    psi_prev = eval_psi(spec, y)
    psi0 = psi_prev

    constants = dict(plan.constants)
    constants["sampled_index"] = stop_index

    for k in range(1, stop_index + 1):
        monitored = (k % monitor_stride == 0) or k == stop_index
        gap = math.nan
        step_norm = math.nan
        if monitored:
            true_grad = np.asarray(spec.f_grad(y), dtype=float)
            true_x = lmo.solve(true_grad)
            gap = fw_gap(spec, y, true_grad, true_x)
            step_norm = grad_map_norm(y, true_x, spec.norm)
        batch = int(plan.batches[k - 1])
        grad_est = minibatch_grad(oracle, y, batch, noise_stream)
        so_calls += batch
        x = lmo.solve(grad_est)
        lmo_calls += 1
        alpha = float(plan.alphas[k - 1])
        y = _combine(y, x, alpha)
        acc *= 1.0 - 0.5 * alpha
        psi_prev = eval_psi(spec, y)
        if monitored:
            records.append(IterateRecord(
                k=k, alpha=alpha, beta=0.0, trials=0, gap=gap, map_norm=step_norm,
                psi=psi_prev, acc=acc, grad_calls=0, lmo_calls=lmo_calls,
                so_calls=so_calls, batch=batch, y=y.copy() if store_vectors else None,
                x=x.copy() if store_vectors else None))

    return RunTrace(algorithm="rscgt", records=records, schedule_constants=constants,
                    outcome="iteration-limit", limit="sampled-index", psi0=psi0,
                    x0=x_start, epsilon=epsilon, n_planned=plan.n_iters, norm=spec.norm,
                    monitor_stride=monitor_stride, sampled_index=stop_index,
                    schedule={"kind": "rscgt-schedule", "case": case})
