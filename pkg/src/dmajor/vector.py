"""Majorization of real vectors, classical and relative to a weight vector.

``x`` is d-majorized by ``y`` (``x <_d y``) when some column-stochastic
matrix ``M`` with ``M d = d`` maps ``y`` to ``x``. For ``d = e`` (all
ones) this is classical majorization.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .exceptions import DimensionTooSmall, NotDStochastic, PreconditionViolated
from .solver import AffineSet, FeasibilityReport, SolverParams, dykstra
from .validation import DEFAULT_TOL, check_same_length, check_vector, check_weights


@dataclass(frozen=True, eq=False)
class StochasticMatrix:
    """Column-stochastic matrix, optionally with a fixed weight vector."""

    entries: np.ndarray
    fixed_vector: np.ndarray | None = None

    def __post_init__(self):
        A = np.array(self.entries, dtype=float)
        A.setflags(write=False)
        object.__setattr__(self, "entries", A)

    def __matmul__(self, other):
        if isinstance(other, StochasticMatrix):
            return StochasticMatrix(self.entries @ other.entries)
        return self.entries @ other

    def verify(self, tol: float = DEFAULT_TOL) -> bool:
        return is_column_stochastic(self.entries, tol) and (
            self.fixed_vector is None
            or is_d_stochastic(self.entries, self.fixed_vector, tol))


def is_column_stochastic(A, tol: float = DEFAULT_TOL) -> bool:
    A = np.asarray(A, dtype=float)
    return bool(A.min(initial=0.0) >= -tol and np.all(np.abs(A.sum(axis=0) - 1) <= tol))


def is_d_stochastic(A, d, tol: float = DEFAULT_TOL) -> bool:
    A = np.asarray(A, dtype=float)
    d = np.asarray(d, dtype=float)
    scale = max(1.0, float(np.abs(d).max()))
    return is_column_stochastic(A, tol) and bool(np.all(np.abs(A @ d - d) <= tol * scale))


def check_d_stochastic(M, d, tol: float = DEFAULT_TOL) -> np.ndarray:
    M = M.entries if isinstance(M, StochasticMatrix) else np.asarray(M, dtype=float)
    if not is_d_stochastic(M, d, tol):
        raise NotDStochastic("matrix is not column-stochastic with M d = d")
    return M


# -- decision procedures ----------------------------------------------------

def classical_majorization_check(x, y, tol: float = DEFAULT_TOL) -> bool:
    """Partial sums of the decreasingly sorted vectors plus equal totals."""
    x, y = check_vector(x, "x"), check_vector(y, "y")
    check_same_length(x, y)
    scale = max(1.0, float(np.abs(x).sum()), float(np.abs(y).sum()))
    sx = np.cumsum(np.sort(x)[::-1])
    sy = np.cumsum(np.sort(y)[::-1])
    if abs(sx[-1] - sy[-1]) > tol * scale:
        return False
    return bool(np.all(sx[:-1] <= sy[:-1] + tol * scale))


class DMajorizationCheck(NamedTuple):
    verdict: bool
    positive_part_criterion: bool
    one_norm_criterion: bool
    sums_equal: bool
    worst_positive_part_margin: float
    worst_one_norm_margin: float
    binding: list

    @property
    def consistent(self) -> bool:
        return self.positive_part_criterion == self.one_norm_criterion


def _positive_part_sums(v: np.ndarray, d: np.ndarray, ts: np.ndarray) -> np.ndarray:
    return np.clip(v[None, :] - ts[:, None] * d[None, :], 0.0, None).sum(axis=1)


def _one_norms(v: np.ndarray, d: np.ndarray, ts: np.ndarray) -> np.ndarray:
    return np.abs(v[None, :] - ts[:, None] * d[None, :]).sum(axis=1)


def d_majorization_check(x, y, d, tol: float = DEFAULT_TOL) -> DMajorizationCheck:
    """Decide ``x <_d y`` with two finite families of inequalities.

    * positive parts: ``sum (x - t d)_+ <= sum (y - t d)_+`` at every
      ``t`` in ``{x_i/d_i, y_i/d_i}``, together with ``sum x = sum y``;
    * one-norms: ``sum x = sum y`` and
      ``||x - (y_i/d_i) d||_1 <= ||y - (y_i/d_i) d||_1`` for every ``i``.

    The verdict requires both. Margins are right minus left hand sides;
    ``binding`` lists breakpoints where some inequality is tight.
    """
    x, y = check_vector(x, "x"), check_vector(y, "y")
    d = check_weights(d)
    check_same_length(x, y, d)
    scale = max(1.0, float(np.abs(x).sum()), float(np.abs(y).sum()), float(d.sum()))
    atol = tol * scale
    sums_equal = abs(x.sum() - y.sum()) <= atol

    t_all = np.concatenate([x / d, y / d])
    pp_margin = _positive_part_sums(y, d, t_all) - _positive_part_sums(x, d, t_all)
    positive_part = sums_equal and bool(np.all(pp_margin >= -atol))

    t_y = y / d
    on_margin = _one_norms(y, d, t_y) - _one_norms(x, d, t_y)
    one_norm = sums_equal and bool(np.all(on_margin >= -atol))

    binding = sorted({float(t) for t, m in zip(t_all, pp_margin) if abs(m) <= atol}
                     | {float(t) for t, m in zip(t_y, on_margin) if abs(m) <= atol})
    return DMajorizationCheck(
        positive_part and one_norm, positive_part, one_norm, sums_equal,
        float(pp_margin.min()), float(on_margin.min()), binding)


def one_norm_curve(x, y, d, ts) -> np.ndarray:
    """``||y - t d||_1 - ||x - t d||_1`` on a grid of ``t`` (diagnostic only)."""
    x, y, d = check_vector(x), check_vector(y), check_weights(d)
    ts = np.asarray(ts, dtype=float)
    return _one_norms(y, d, ts) - _one_norms(x, d, ts)


# -- constructions ----------------------------------------------------------

def collapse_matrix(x) -> StochasticMatrix:
    """0/1 column-stochastic ``A`` with ``A x = (sum x_+, -sum x_-, 0, ..., 0)``.

    Column ``j`` puts its unit into row 0 when ``x_j >= 0`` and into row 1
    otherwise.
    """
    x = check_vector(x, "x")
    n = x.size
    if n < 2:
        raise DimensionTooSmall("need at least two entries")
    A = np.zeros((n, n))
    A[np.where(x >= 0, 0, 1), np.arange(n)] = 1.0
    return StochasticMatrix(A)


def _t_transform(n: int, j: int, k: int, lam: float) -> np.ndarray:
    T = np.eye(n)
    T[[j, k], [j, k]] = lam
    T[j, k] = T[k, j] = 1 - lam
    return T


def doubly_stochastic_witness(x, z, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Doubly stochastic ``B`` with ``B z = x`` for ``x`` classically majorized by ``z``.

    Built from a chain of at most ``n - 1`` T-transforms on the
    decreasingly sorted vectors: at each step ``j`` is the largest index
    with ``z_j > x_j`` and ``k`` the smallest index after it with
    ``x_k > z_k``; ``z_j`` and ``z_k`` are moved towards each other by
    ``min(z_j - x_j, x_k - z_k)``.
    """
    x, z = check_vector(x, "x"), check_vector(z, "z")
    n = check_same_length(x, z)
    scale = max(1.0, float(np.abs(x).sum()), float(np.abs(z).sum()))
    atol = tol * scale
    px = np.argsort(-x, kind="stable")
    pz = np.argsort(-z, kind="stable")
    xs, cur = x[px], z[pz].copy()
    B = np.eye(n)
    for _ in range(n):
        diff = cur - xs
        above = np.where(diff > atol)[0]
        if above.size == 0:
            break
        j = int(above.max())
        below = np.where(diff[j + 1:] < -atol)[0]
        if below.size == 0:
            break
        k = j + 1 + int(below.min())
        delta = min(cur[j] - xs[j], xs[k] - cur[k])
        gap = cur[j] - cur[k]
        lam = float(np.clip(1 - delta / gap, 0.0, 1.0))
        T = _t_transform(n, j, k, lam)
        cur = T @ cur
        B = T @ B
    # undo the sorting: B_full = P_x^T B P_z
    Px = np.eye(n)[px]
    Pz = np.eye(n)[pz]
    return Px.T @ B @ Pz


def transfer_matrix(x, y, tol: float = DEFAULT_TOL) -> StochasticMatrix:
    """Column-stochastic ``M`` with ``M y = x``.

    Requires ``sum x = sum y`` and ``||x||_1 <= ||y||_1``. ``M = B A`` where
    ``A`` collapses ``y`` onto its positive and negative mass and ``B`` is
    doubly stochastic.
    """
    x, y = check_vector(x, "x"), check_vector(y, "y")
    check_same_length(x, y)
    scale = max(1.0, float(np.abs(x).sum()), float(np.abs(y).sum()))
    if abs(x.sum() - y.sum()) > tol * scale:
        raise PreconditionViolated(f"sums differ: {x.sum():.12g} vs {y.sum():.12g}")
    if np.abs(x).sum() > np.abs(y).sum() + tol * scale:
        raise PreconditionViolated(
            f"||x||_1 = {np.abs(x).sum():.12g} exceeds ||y||_1 = {np.abs(y).sum():.12g}")
    if x.size == 1:
        return StochasticMatrix(np.eye(1))
    A = collapse_matrix(y).entries
    B = doubly_stochastic_witness(x, A @ y, tol)
    return StochasticMatrix(B @ A)


def random_d_stochastic(d, rng: np.random.Generator, n_factors: int | None = None) -> np.ndarray:
    """Random d-stochastic matrix as a product of two-coordinate d-stochastic moves
    mixed with the rank-one map ``d e^T / e^T d``."""
    d = check_weights(d)
    n = d.size
    M = np.eye(n)
    for _ in range(n_factors or 2 * n):
        if n < 2:
            break
        i, j = rng.choice(n, size=2, replace=False)
        a = rng.uniform(0, min(1.0, d[j] / d[i]))
        E = np.eye(n)
        E[i, i], E[j, i] = 1 - a, a
        b = a * d[i] / d[j]
        E[i, j], E[j, j] = b, 1 - b
        M = E @ M
    mix = rng.uniform(0, 0.3)
    return (1 - mix) * M + mix * np.outer(d, np.ones(n)) / d.sum()


def d_stochastic_witness(x, y, d, params: SolverParams = SolverParams()) -> FeasibilityReport:
    """Search a d-stochastic ``M`` with ``M y = x`` by alternating projections.

    The cone is the nonnegative orthant on the ``n x n`` entries; the
    affine set holds ``e^T M = e^T``, ``M d = d`` and ``M y = x``. The
    witness of a ``Feasible`` report is a :class:`StochasticMatrix`.
    """
    x, y = check_vector(x, "x"), check_vector(y, "y")
    d = check_weights(d)
    n = check_same_length(x, y, d)
    I = np.eye(n)
    # vec(M) row-major: (e^T M)_j = sum_i M_ij ; (M v)_i = sum_j M_ij v_j
    L = np.vstack([np.kron(np.ones((1, n)), I), np.kron(I, d[None, :]), np.kron(I, y[None, :])])
    b = np.concatenate([np.ones(n), d, x])
    affine = AffineSet(L, b)
    start = (np.outer(d, np.ones(n)) / d.sum()).ravel()
    report = dykstra(start, lambda v: np.clip(v, 0.0, None), affine, params)
    if report.witness is not None:
        report.witness = StochasticMatrix(report.witness.reshape(n, n), d)
    return report
