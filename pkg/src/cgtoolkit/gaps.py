"""Stationarity measures for composite conditional-gradient iterations.

Two quantities are tracked at each iterate y with subproblem solution x:

* the generalized Frank-Wolfe gap ``<f'(y), y - x> + h(y) - h(x)``, which is
  nonnegative, zero exactly at stationary points of the composite objective,
  and an upper bound on the optimality gap when f is convex;
* the gradient-mapping norm ``||y - x||``, a stationarity measure dominated
  via the gap when h is strongly convex.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .problems import InfeasiblePointError, ProblemSpec, vector_norm

Array = np.ndarray

# Round-off gaps in (-HARD_FLOOR, 0) clamp to zero; anything at or below
# -HARD_FLOOR indicates an implementation bug and raises.
_HARD_FLOOR = 1e-10


class GapComputationError(ArithmeticError):
    """Gap fell below the round-off floor: inconsistent oracles or a bug."""


def fw_gap(spec: ProblemSpec, y, grad_at_y, x_sol) -> float:
    """Generalized Frank-Wolfe gap at y given the subproblem solution x_sol.

    Caller contract: ``x_sol`` minimizes <grad_at_y, u> + h(u), so the value
    is nonnegative up to round-off.  Tiny negative values clamp to zero.
    """
    y = np.asarray(y, dtype=float)
    x_sol = np.asarray(x_sol, dtype=float)
    grad_at_y = np.asarray(grad_at_y, dtype=float)
    hy = spec.h_value(y)
    if not math.isfinite(hy):
        raise InfeasiblePointError("gap queried at an infeasible point")
    value = float(grad_at_y @ (y - x_sol)) + hy - spec.h_value(x_sol)
    if value < 0.0:
        if value <= -_HARD_FLOOR:
            raise GapComputationError(
                f"gap {value:.3e} is below the -1e-10 round-off floor; "
                "the subproblem solution cannot be optimal"
            )
        value = 0.0
    return value


def grad_map_norm(y, x_sol, norm: str = "l2") -> float:
    """Gradient-mapping norm ||y - x_sol|| in the configured norm."""
    y = np.asarray(y, dtype=float)
    x_sol = np.asarray(x_sol, dtype=float)
    return vector_norm(y - x_sol, norm)


@dataclass(frozen=True)
class GapReport:
    """Both stationarity measures plus the cross-check bounds, when available.

    ``lemma_a_bound`` is (M_f + M_h) * ||y - x||, an upper bound on the gap
    when gradient/subgradient bounds are declared.  ``lemma_b_bound`` is
    2 * gap / mu, an upper bound on ||y - x||^2 when h is strongly convex.
    """

    fw_gap: float
    grad_map_norm: float
    lemma_a_bound: float | None = None
    lemma_b_bound: float | None = None


def gap_report(spec: ProblemSpec, y, grad_at_y, x_sol) -> GapReport:
    gap = fw_gap(spec, y, grad_at_y, x_sol)
    map_norm = grad_map_norm(y, x_sol, spec.norm)
    lemma_a = None
    if spec.grad_bound is not None and spec.subgrad_bound is not None:
        lemma_a = (spec.grad_bound + spec.subgrad_bound) * map_norm
    lemma_b = 2.0 * gap / spec.mu if spec.mu > 0 else None
    return GapReport(fw_gap=gap, grad_map_norm=map_norm,
                     lemma_a_bound=lemma_a, lemma_b_bound=lemma_b)


@dataclass(frozen=True)
class StationarityVerdict:
    """Which epsilon-stationarity criteria hold at a given gap report."""

    epsilon: float
    gap_ok: bool
    map_ok: bool | None
    map_threshold: float | None
    optimality_ok: bool | None
    optimality_bound: float | None
    notes: tuple[str, ...]

    @property
    def satisfied(self) -> bool:
        return self.gap_ok


def epsilon_stationarity_certificate(spec: ProblemSpec, gap: GapReport,
                                     epsilon: float) -> StationarityVerdict:
    """Evaluate the stationarity criteria a gap report supports.

    (i) gap <= epsilon; (ii) on bounded sets, the gradient-mapping norm
    against the threshold (epsilon / (L_nu * D))^(1/nu); (iii) when f is
    declared convex, the implied optimality-gap bound psi(y) - psi* <= gap.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    notes: list[str] = []
    gap_ok = gap.fw_gap <= epsilon
    if spec.bounded:
        threshold = (epsilon / (spec.L_nu * spec.diameter)) ** (1.0 / spec.nu)
        map_ok = gap.grad_map_norm <= threshold
    else:
        threshold = None
        map_ok = None
        notes.append("gradient-mapping criterion skipped: feasible set unbounded")
    if spec.convex_f:
        optimality_ok = gap_ok
        optimality_bound = gap.fw_gap
    else:
        optimality_ok = None
        optimality_bound = None
        notes.append("optimality-gap criterion skipped: f not declared convex")
    return StationarityVerdict(
        epsilon=epsilon,
        gap_ok=gap_ok,
        map_ok=map_ok,
        map_threshold=threshold,
        optimality_ok=optimality_ok,
        optimality_bound=optimality_bound,
        notes=tuple(notes),
    )
