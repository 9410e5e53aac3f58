"""Convex feasibility by Dykstra's alternating projections.

The problems solved here are all of the form "find ``x`` in a closed
convex cone that also satisfies linear equations ``L x = b``". Alternating
projections cannot certify infeasibility, so a run ends in one of three
verdicts:

* ``Feasible``: cone iterate within ``eps_feas`` of the affine set and
  the equations hold to ``eps_feas`` (relative to the right-hand side);
* ``InfeasibleHeuristic``: the cone/affine gap stopped shrinking (relative
  improvement below ``plateau_improvement`` over ``plateau_window``
  iterations) while still above ``eps_infeas``;
* ``Undecided``: the iteration budget ran out first.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np


class Verdict(str, enum.Enum):
    FEASIBLE = "Feasible"
    INFEASIBLE = "InfeasibleHeuristic"
    UNDECIDED = "Undecided"


@dataclass(frozen=True)
class SolverParams:
    max_iter: int = 50_000
    eps_feas: float = 1e-8
    eps_infeas: float = 1e-5
    plateau_window: int = 500
    plateau_improvement: float = 1e-3
    trace_every: int = 50


@dataclass
class FeasibilityReport:
    verdict: Verdict
    witness: Any = None
    residual_trace: list = field(default_factory=list)
    constraint_residuals: dict = field(default_factory=dict)
    iterations: int = 0
    residual: float = float("nan")
    notes: list = field(default_factory=list)

    @property
    def feasible(self) -> bool:
        return self.verdict is Verdict.FEASIBLE

    @property
    def decided(self) -> bool:
        return self.verdict is not Verdict.UNDECIDED


class AffineSet:
    """``{x : L x = b}`` with a precomputed orthonormal basis of the row space of ``L``.

    Projection is ``x - Q^T (Q x - Q x0)`` where ``x0`` is the least-squares
    solution. ``consistent`` is false when ``L x = b`` has no solution.
    """

    def __init__(self, L: np.ndarray, b: np.ndarray, rank_tol: float = 1e-12):
        L = np.asarray(L, dtype=float)
        b = np.asarray(b, dtype=float)
        U, s, Vh = np.linalg.svd(L, full_matrices=False)
        smax = float(s.max()) if s.size else 0.0
        rank = int(np.sum(s > rank_tol * max(1.0, smax)))
        self.L, self.b = L, b
        self.Q = Vh[:rank]
        coeffs = (U[:, :rank].T @ b) / s[:rank]
        self.x0 = self.Q.T @ coeffs
        self.Qx0 = coeffs
        self.scale = max(1.0, float(np.linalg.norm(b)))
        self.inconsistency = float(np.linalg.norm(L @ self.x0 - b)) / self.scale
        self.consistent = self.inconsistency <= 1e-10

    def project(self, x: np.ndarray) -> np.ndarray:
        return x - self.Q.T @ (self.Q @ x - self.Qx0)

    def violation(self, x: np.ndarray) -> np.ndarray:
        return self.L @ x - self.b


def dykstra(x_start: np.ndarray, project_cone: Callable[[np.ndarray], np.ndarray],
            affine: AffineSet, params: SolverParams = SolverParams(),
            accept: Callable[[np.ndarray], bool] | None = None) -> FeasibilityReport:
    """Run Dykstra's algorithm between a cone and an affine set.

    ``accept`` may impose an extra check on a candidate cone iterate
    before ``Feasible`` is declared. The witness in the report is the last
    cone iterate (a vector; callers reshape it).
    """
    if not affine.consistent:
        return FeasibilityReport(
            Verdict.INFEASIBLE, residual=affine.inconsistency,
            notes=[f"linear constraints are inconsistent (residual {affine.inconsistency:.3g})"])

    scale = affine.scale
    x = project_cone(x_start)
    q = np.zeros_like(x)
    trace: list = []
    window_start = None
    verdict = Verdict.UNDECIDED
    r = float("inf")
    it = 0
    for it in range(1, params.max_iter + 1):
        y = affine.project(x)
        x_new = project_cone(y + q)
        q = y + q - x_new
        x = x_new
        r = float(np.linalg.norm(x - y)) / scale
        if it % params.trace_every == 0 or it == 1:
            trace.append((it, r))
        if r < params.eps_feas:
            viol = float(np.max(np.abs(affine.violation(x)), initial=0.0)) / scale
            if viol < params.eps_feas and (accept is None or accept(x)):
                verdict = Verdict.FEASIBLE
                break
        if it % params.plateau_window == 0:
            if window_start is not None and r > params.eps_infeas:
                improvement = (window_start - r) / window_start
                if improvement < params.plateau_improvement:
                    verdict = Verdict.INFEASIBLE
                    break
            window_start = r
    if not trace or trace[-1][0] != it:
        trace.append((it, r))
    viol = affine.violation(x)
    report = FeasibilityReport(
        verdict, witness=x, residual_trace=trace, iterations=it, residual=r,
        constraint_residuals={"max_abs": float(np.max(np.abs(viol), initial=0.0))})
    if verdict is Verdict.UNDECIDED:
        report.notes.append(f"iteration budget of {params.max_iter} exhausted")
    return report
