"""D-majorization of matrices.

``A`` is D-majorized by ``B`` (``A <_D B``) for a positive definite ``D``
when some quantum channel ``T`` satisfies ``T(B) = A`` and ``T(D) = D``.
Everything here works with ``D = diag(d)``; a non-diagonal ``D`` is
diagonalised first and ``A``, ``B`` are rotated into its eigenbasis.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

import numpy as np

from . import channels, linalg, vector
from .channels import ChoiMatrix
from .exceptions import (
    ConstantWeights,
    DomainViolation,
    IndexOutOfRange,
    PreconditionViolated,
    ShapeMismatch,
    WrongDimension,
)
from .solver import AffineSet, FeasibilityReport, SolverParams, Verdict, dykstra
from .validation import (
    DEFAULT_TOL,
    check_hermitian,
    check_matrix,
    check_state,
    check_weights,
    hermitian_part,
    scale_of,
)


@dataclass(frozen=True, eq=False)
class DMajInstance:
    """The question "is ``A`` D-majorized by ``B``" with ``D = diag(d)``.

    ``basis`` is the unitary that diagonalised the original ``D`` (``None``
    when ``D`` was given diagonal); ``A`` and ``B`` are stored in that basis.
    """

    A: np.ndarray
    B: np.ndarray
    d: np.ndarray
    basis: np.ndarray | None = None

    @classmethod
    def create(cls, A, B, D, hermitian: bool = True, tol: float = DEFAULT_TOL) -> "DMajInstance":
        """Build an instance from ``A``, ``B`` and either a weight vector or a PD matrix ``D``."""
        if hermitian:
            A, B = check_hermitian(A, tol, "A"), check_hermitian(B, tol, "B")
        else:
            A, B = check_matrix(A, "A"), check_matrix(B, "B")
        if A.shape != B.shape:
            raise ShapeMismatch(f"A and B have shapes {A.shape} and {B.shape}")
        D = np.asarray(D)
        if D.ndim == 1:
            d, W = check_weights(D), None
        else:
            D = check_hermitian(D, tol, "D")
            off = D - np.diag(np.diag(D))
            if np.abs(off).max(initial=0.0) <= tol * scale_of(D):
                d, W = check_weights(np.diag(D).real), None
            else:
                w, W = linalg.eigh(D)
                d = check_weights(w)
                A, B = W.conj().T @ A @ W, W.conj().T @ B @ W
                if hermitian:
                    A, B = hermitian_part(A), hermitian_part(B)
        if d.size != A.shape[0]:
            raise ShapeMismatch(f"d has length {d.size}, matrices are {A.shape[0]}x{A.shape[0]}")
        return cls(A, B, d, W)

    @property
    def n(self) -> int:
        return self.d.size

    @property
    def D(self) -> np.ndarray:
        return np.diag(self.d).astype(complex)

    def whiten(self, X: np.ndarray) -> np.ndarray:
        """``D^{-1/2} X D^{-1/2}``."""
        s = 1 / np.sqrt(self.d)
        return hermitian_part(s[:, None] * X * s[None, :])

    def to_original(self, C: ChoiMatrix) -> ChoiMatrix:
        """Express a channel found in the eigenbasis of ``D`` in the original basis."""
        if self.basis is None:
            return C
        W = self.basis
        return channels.choi_from_map(lambda X: W @ C(W.conj().T @ X @ W) @ W.conj().T, self.n, self.n)


@dataclass
class QubitCheckReport:
    b1: float
    b2: float
    trace_equal: bool
    norm_ineqs: tuple
    fidelity_ineq: bool
    verdict: bool
    degenerate: bool = False
    norm_margins: tuple = ()
    fidelity_a: float = float("nan")
    fidelity_b: float = float("nan")

    @property
    def fidelity_margin(self) -> float:
        return self.fidelity_a - self.fidelity_b


def _clamped_sqrt(X: np.ndarray) -> np.ndarray:
    return linalg.apply_function(X, lambda w: np.sqrt(np.clip(w, 0.0, None)))


def generalized_fidelity(X: np.ndarray, Y: np.ndarray) -> float:
    """``||sqrt(X) sqrt(Y)||_1`` with negative eigenvalues clamped to zero."""
    return linalg.trace_norm(_clamped_sqrt(X) @ _clamped_sqrt(Y))


def qubit_check(inst: DMajInstance, tol: float = DEFAULT_TOL) -> QubitCheckReport:
    """Decide ``A <_D B`` for 2x2 hermitian matrices.

    Conditions: equal traces, ``||A - b_i D||_1 <= ||B - b_i D||_1`` for
    both eigenvalues ``b_1 <= b_2`` of ``D^{-1/2} B D^{-1/2}``, and the
    fidelity inequality
    ``||sqrt(A - b_1 D) sqrt(b_2 D - A)||_1 >= ||sqrt(B - b_1 D) sqrt(b_2 D - B)||_1``.
    When ``b_1 == b_2`` the fidelity sides both vanish and only the first
    two conditions decide (flagged as ``degenerate``).
    """
    if inst.n != 2:
        raise WrongDimension(f"qubit_check needs 2x2 matrices, got n={inst.n}")
    A, B, D = inst.A, inst.B, inst.D
    scale = max(scale_of(A), scale_of(B), scale_of(D))
    atol = tol * scale
    b1, b2 = (float(v) for v in linalg.hermitian_eig(inst.whiten(B), tol).eigenvalues)
    trace_equal = abs(np.trace(A).real - np.trace(B).real) <= atol
    margins = tuple(linalg.trace_norm(B - b * D) - linalg.trace_norm(A - b * D) for b in (b1, b2))
    norm_ok = tuple(m >= -atol for m in margins)
    degenerate = (b2 - b1) <= atol
    fa = generalized_fidelity(A - b1 * D, b2 * D - A)
    fb = generalized_fidelity(B - b1 * D, b2 * D - B)
    fid_ok = True if degenerate else fa >= fb - atol
    verdict = trace_equal and all(norm_ok) and fid_ok
    return QubitCheckReport(b1, b2, trace_equal, norm_ok, fid_ok, verdict,
                            degenerate, margins, fa, fb)


def normalize_to_states(inst: DMajInstance, t0: float | None = None) -> DMajInstance:
    """Shift and rescale an equal-trace instance into a pair of states.

    ``A~ = (A - t0 D) / (tr A - t0 tr D)`` and likewise ``B~`` with the same
    denominator, for any ``t0`` below ``s``, the smallest eigenvalue of the
    whitened ``A`` and ``B``. The default is ``t0 = s - 1``. D-majorization
    is unchanged by this affine move, so every check here gives the same
    verdict on the normalized instance.
    """
    s = float(spectral_breakpoints(inst).min())
    t0 = s - 1.0 if t0 is None else float(t0)
    if t0 >= s:
        raise PreconditionViolated(f"t0={t0:.6g} must lie below s={s:.6g}")
    denom = float(np.trace(inst.A).real) - t0 * inst.d.sum()
    A = (inst.A - t0 * inst.D) / denom
    B = (inst.B - t0 * inst.D) / denom
    return DMajInstance(A, B, inst.d, inst.basis)


class CurveCheck(NamedTuple):
    holds: bool
    worst_margin: float
    t_worst: float
    t_values: np.ndarray


def spectral_breakpoints(inst: DMajInstance) -> np.ndarray:
    return np.concatenate([linalg.eigvalsh(inst.whiten(inst.A)), linalg.eigvalsh(inst.whiten(inst.B))])


def default_t_grid(inst: DMajInstance, points: int = 41) -> np.ndarray:
    b = linalg.eigvalsh(inst.whiten(inst.B))
    return np.linspace(b[0] - 1, b[-1] + 1, points)


def trace_norm_curve_check(inst: DMajInstance, t_values: Iterable[float] | None = None,
                           tol: float = DEFAULT_TOL) -> CurveCheck:
    """Check ``||A - t D||_1 <= ||B - t D||_1`` on a set of ``t``.

    The supplied ``t`` (default: 41 points over ``[b_1 - 1, b_2 + 1]``) are
    always joined by the spectral breakpoints of the whitened ``A`` and
    ``B``. Necessary for ``A <_D B`` in any dimension; decisive for qubits
    together with equal traces.
    """
    grid = default_t_grid(inst) if t_values is None else np.asarray(list(t_values), dtype=float)
    ts = np.concatenate([grid, spectral_breakpoints(inst)])
    A, B, D = inst.A, inst.B, inst.D
    margins = np.array([linalg.trace_norm(B - t * D) - linalg.trace_norm(A - t * D) for t in ts])
    scale = max(scale_of(A), scale_of(B), scale_of(D))
    i = int(np.argmin(margins))
    return CurveCheck(bool(margins[i] >= -tol * scale), float(margins[i]), float(ts[i]), ts)


# -- feasibility ------------------------------------------------------------

def _herm_coords(N: int):
    iu = np.triu_indices(N, 1)
    return iu, len(iu[0])


def _herm_to_vec(M: np.ndarray, iu) -> np.ndarray:
    r2 = np.sqrt(2.0)
    upper = M[iu]
    return np.concatenate([np.diag(M).real, r2 * upper.real, r2 * upper.imag])


def _vec_to_herm(v: np.ndarray, N: int, iu, n_upper: int) -> np.ndarray:
    M = np.zeros((N, N), dtype=complex)
    upper = (v[N:N + n_upper] + 1j * v[N + n_upper:]) / np.sqrt(2.0)
    M[iu] = upper
    M = M + M.conj().T
    M[np.diag_indices(N)] = v[:N]
    return M


def _choi_constraints(C4: np.ndarray, B: np.ndarray, D: np.ndarray) -> np.ndarray:
    traces = np.einsum("iaja->ij", C4).ravel()
    TB = np.einsum("ij,iajb->ab", B, C4).ravel()
    TD = np.einsum("ij,iajb->ab", D, C4).ravel()
    z = np.concatenate([traces, TB, TD])
    return np.concatenate([z.real, z.imag])


def d_maj_feasibility(inst: DMajInstance, params: SolverParams = SolverParams()) -> FeasibilityReport:
    """Search a channel ``T`` with ``T(B) = A`` and ``T(D) = D``.

    Dykstra iterations on the hermitian Choi matrix between the PSD cone
    and the affine set {trace preserving, ``T(B) = A``, ``T(D) = D``}. The
    start is the trace projection onto ``D / tr D``. A ``Feasible``
    report carries the witness as a :class:`ChoiMatrix` in the original
    basis; ``constraint_residuals`` holds the Frobenius errors.
    """
    n = inst.n
    N = n * n
    for name, C in _obvious_witnesses(inst):
        res = _witness_residuals(C, inst)
        bound = params.eps_feas * max(1.0, scale_of(inst.A), scale_of(inst.D))
        if res["image_error_fro"] < bound and res["fixed_point_error_fro"] < bound:
            return FeasibilityReport(
                Verdict.FEASIBLE, witness=inst.to_original(C), residual_trace=[(0, 0.0)],
                constraint_residuals=res, iterations=0, residual=0.0,
                notes=[f"{name} is a witness; no iterations needed"])
    iu, n_upper = _herm_coords(N)
    dim = N + 2 * n_upper
    A, B, D = inst.A, inst.B, inst.D

    L = np.empty((2 * 3 * N, dim))
    for col in range(dim):
        e = np.zeros(dim)
        e[col] = 1.0
        L[:, col] = _choi_constraints(_vec_to_herm(e, N, iu, n_upper).reshape(n, n, n, n), B, D)
    target = np.concatenate([np.eye(n).ravel(), A.ravel(), D.ravel()]).astype(complex)
    rhs = np.concatenate([target.real, target.imag])
    affine = AffineSet(L, rhs)

    def cone(v):
        return _herm_to_vec(linalg._psd_project(_vec_to_herm(v, N, iu, n_upper)), iu)

    bound = params.eps_feas * affine.scale

    def accept(v):
        C4 = _vec_to_herm(v, N, iu, n_upper).reshape(n, n, n, n)
        return (np.linalg.norm(np.einsum("ij,iajb->ab", B, C4) - A) < bound
                and np.linalg.norm(np.einsum("ij,iajb->ab", D, C4) - D) < bound)

    start = _herm_to_vec(np.kron(np.eye(n), D / inst.d.sum()), iu)
    report = dykstra(start, cone, affine, params, accept)
    if report.witness is not None:
        witness = ChoiMatrix(n, n, _vec_to_herm(report.witness, N, iu, n_upper))
        report.constraint_residuals.update(_witness_residuals(witness, inst))
        report.witness = inst.to_original(witness)
    return report


def _obvious_witnesses(inst: DMajInstance):
    """Witnesses that sit on the boundary of the PSD cone, where alternating
    projections converge slowly: the identity and the trace projection onto ``D``."""
    n = inst.n
    yield "identity channel", channels.identity_channel(n)
    yield "trace projection onto D/tr D", channels.trace_projection(inst.D / inst.d.sum())


def _witness_residuals(C: ChoiMatrix, inst: DMajInstance) -> dict:
    return {
        "choi_min_eigenvalue": float(linalg.eigvalsh(C.matrix)[0]),
        "trace_preservation": channels.is_tp(C).deviation,
        "image_error_fro": float(np.linalg.norm(C(inst.B) - inst.A)),
        "fixed_point_error_fro": float(np.linalg.norm(C(inst.D) - inst.D)),
    }


@dataclass
class Decision:
    verdict: Verdict
    method: str
    qubit: QubitCheckReport | None = None
    feasibility: FeasibilityReport | None = None
    notes: list = field(default_factory=list)

    @property
    def agree(self) -> bool | None:
        """Whether the qubit test and the solver agree (``None`` if not both ran or undecided)."""
        if self.qubit is None or self.feasibility is None or not self.feasibility.decided:
            return None
        return self.qubit.verdict == self.feasibility.feasible


def decide(inst: DMajInstance, method: str = "auto", params: SolverParams = SolverParams(),
           tol: float = DEFAULT_TOL) -> Decision:
    """Decide ``A <_D B`` with the qubit test, the solver, or both (``auto``).

    ``auto`` runs the qubit test and the solver for ``n = 2`` (the qubit
    test supplies the verdict) and the solver alone otherwise.
    """
    if method not in ("auto", "qubit", "feasibility"):
        raise ValueError(f"unknown method {method!r}")
    qubit = report = None
    if method == "qubit" or (method == "auto" and inst.n == 2):
        qubit = qubit_check(inst, tol)
    if method == "feasibility" or method == "auto":
        report = d_maj_feasibility(inst, params)
    if qubit is not None:
        verdict = Verdict.FEASIBLE if qubit.verdict else Verdict.INFEASIBLE
    else:
        verdict = report.verdict
    decision = Decision(verdict, method, qubit, report)
    if decision.agree is False:
        decision.notes.append("qubit test and solver disagree")
    return decision


# -- constructions ----------------------------------------------------------

def lift_diagonal_channel(M, d, tol: float = DEFAULT_TOL) -> ChoiMatrix:
    """Channel acting on diagonals by a d-stochastic ``M`` and killing off-diagonals.

    ``T(|e_i><e_j|) = 0`` for ``i != j`` and ``T(|e_i><e_i|) = sum_k M_ki |e_k><e_k|``.
    Its Choi matrix is diagonal and nonnegative.
    """
    d = check_weights(d)
    M = vector.check_d_stochastic(M, d, tol)
    n = d.size
    C = np.zeros((n, n, n, n), dtype=complex)
    for i in range(n):
        C[i, :, i, :] = np.diag(M[:, i])
    return ChoiMatrix(n, n, C.reshape(n * n, n * n))


def construct_channel_pair(A, B, omega=None, tol: float = DEFAULT_TOL) -> ChoiMatrix:
    """Channel ``T`` with ``T(B) = A`` for hermitian ``A``, ``B``.

    Needs ``tr A = tr B`` and ``||A||_1 <= ||B||_1``. With ``A = U diag(x) U^*``
    and ``B = V diag(y) V^*``, ``T(X) = U T~(V^* X V) U^*`` where ``T~`` lifts
    a column-stochastic ``M`` with ``M y = x``. If ``B`` has a zero
    eigenvalue and ``omega`` is given, ``T`` maps the corresponding
    eigenvector ``psi`` to ``omega``.
    """
    A, B = check_hermitian(A, tol, "A"), check_hermitian(B, tol, "B")
    if A.shape != B.shape:
        raise ShapeMismatch("A and B must have the same shape")
    n = A.shape[0]
    scale = max(scale_of(A), scale_of(B))
    x, U = linalg.eigh(A)
    y, V = linalg.eigh(B)
    if abs(x.sum() - y.sum()) > tol * scale:
        raise PreconditionViolated(f"traces differ: {x.sum():.12g} vs {y.sum():.12g}")
    if np.abs(x).sum() > np.abs(y).sum() + tol * scale:
        raise PreconditionViolated(
            f"||A||_1 = {np.abs(x).sum():.12g} exceeds ||B||_1 = {np.abs(y).sum():.12g}")
    M = vector.transfer_matrix(x, y, tol).entries
    C = np.zeros((n, n, n, n), dtype=complex)
    for i in range(n):
        C[i, :, i, :] = np.diag(M[:, i])
    if omega is not None:
        omega = check_state(omega, tol, "omega")
        zero = np.where(np.abs(y) <= tol * scale)[0]
        if zero.size == 0:
            raise PreconditionViolated("B has no zero eigenvalue to route to omega")
        j = int(zero[np.argmin(np.abs(y[zero]))])
        C[j, :, j, :] = U.conj().T @ omega @ U
    inner = ChoiMatrix(n, n, C.reshape(n * n, n * n))
    return channels.choi_from_map(lambda X: U @ inner(V.conj().T @ X @ V) @ U.conj().T, n, n)


class PureStateResult(NamedTuple):
    verdict: bool
    witness: ChoiMatrix | None
    min_eigenvalue: float


def pure_state_majorization(rho, j: int, d, tol: float = DEFAULT_TOL) -> PureStateResult:
    """Is the state ``rho`` D-majorized by ``|e_j><e_j|`` (``j`` zero-based)?

    Holds iff ``D - d_j rho >= 0``. The witness sends ``|e_j><e_j|`` to
    ``rho``, every other ``|e_i><e_i|`` to ``omega = (D - d_j rho)/(e^T d - d_j)``
    and off-diagonal units to zero; its Choi matrix is block diagonal.
    """
    d = check_weights(d)
    n = d.size
    if not 0 <= j < n:
        raise IndexOutOfRange(f"j={j} is outside 0..{n - 1}")
    rho = check_state(rho, tol)
    if rho.shape[0] != n:
        raise ShapeMismatch("rho and d have different dimensions")
    gap = np.diag(d) - d[j] * rho
    check = linalg.psd_check(gap, tol)
    if not check.is_psd:
        return PureStateResult(False, None, check.min_eigenvalue)
    if n == 1:
        return PureStateResult(True, channels.identity_channel(1), check.min_eigenvalue)
    omega = gap / (d.sum() - d[j])
    C = np.zeros((n, n, n, n), dtype=complex)
    for i in range(n):
        C[i, :, i, :] = rho if i == j else omega
    return PureStateResult(True, ChoiMatrix(n, n, C.reshape(n * n, n * n)), check.min_eigenvalue)


class MinMaxElements(NamedTuple):
    minimal: np.ndarray
    maximal: list
    unique_max: bool
    indices: list


def minmax_elements(d, tie_tol: float = 1e-12) -> MinMaxElements:
    """``D`` is the least element of the trace hyperplane; ``(e^T d) |e_k><e_k|``
    is maximal among PSD matrices for every ``k`` with minimal ``d_k``."""
    d = check_weights(d)
    total = d.sum()
    ks = [int(k) for k in np.where(d <= d.min() + tie_tol * max(1.0, d.max()))[0]]
    maximal = []
    for k in ks:
        P = np.zeros((d.size, d.size), dtype=complex)
        P[k, k] = total
        maximal.append(P)
    return MinMaxElements(np.diag(d).astype(complex), maximal, len(ks) == 1, ks)


def minimal_witness(d) -> ChoiMatrix:
    """Trace projection ``X -> tr(X) D / tr D``; maps everything of trace ``tr D`` to ``D``."""
    d = check_weights(d)
    return channels.trace_projection(np.diag(d) / d.sum())


class MatrixConvexResult(NamedTuple):
    name: str
    lhs: float
    rhs: float
    holds: bool


def _psi(spec):
    if spec == "square":
        return "x^2", lambda w: w ** 2, None
    if isinstance(spec, tuple) and spec[0] == "inverse":
        c = float(spec[1])
        return f"1/(x+{c:g})", lambda w: 1 / (w + c), c
    raise ValueError(f"unsupported function {spec!r}; use 'square' or ('inverse', c)")


def matrix_convex_necessary_check(inst: DMajInstance, family=("square",),
                                  tol: float = DEFAULT_TOL) -> list[MatrixConvexResult]:
    """Evaluate ``tr(D f(D^{-1/2} A D^{-1/2})) <= tr(D f(D^{-1/2} B D^{-1/2}))``.

    Necessary for ``A <_D B`` but not sufficient. ``family`` holds
    ``"square"`` and/or ``("inverse", c)`` for ``f(x) = 1/(x + c)``.
    """
    out = []
    D = inst.D
    WA, WB = inst.whiten(inst.A), inst.whiten(inst.B)
    for spec in family:
        name, f, shift = _psi(spec)
        if shift is not None:
            lowest = min(linalg.eigvalsh(WA)[0], linalg.eigvalsh(WB)[0])
            if lowest <= -shift:
                raise DomainViolation(f"spectrum reaches {lowest:.6g} <= -{shift:g}")
        lhs = float(np.trace(D @ linalg.apply_function(WA, f)).real)
        rhs = float(np.trace(D @ linalg.apply_function(WB, f)).real)
        out.append(MatrixConvexResult(name, lhs, rhs, lhs <= rhs + tol * max(1.0, abs(rhs))))
    return out


# -- alternating M_1 / M_D iteration -----------------------------------------

@dataclass
class IterationResult:
    iterates: np.ndarray
    distances: np.ndarray
    q: float
    j: int
    mirrored: bool
    step_matrix: np.ndarray
    factors: list
    closed_form_error: float


def _right_shift(n: int) -> np.ndarray:
    return np.roll(np.eye(n), 1, axis=0)


def _iteration_factors(d: np.ndarray, j: int) -> tuple[list, float]:
    """Factors, rightmost first, of one macro step for ``d_j > d_{j+1}`` (zero-based ``j``)."""
    n = d.size
    q = d[j + 1] / d[j]
    T = np.eye(n)
    T[j, j], T[j, j + 1], T[j + 1, j], T[j + 1, j + 1] = 1 - q, 1.0, q, 0.0
    S = _right_shift(n)
    # sigma^{n-j+1} T (sigma T)^{n-2} sigma^j with 1-based j  ->  shifts of j+1 and n-j
    factors = [("e", S)] * (j + 1)
    for _ in range(n - 2):
        factors += [("d", T), ("e", S)]
    factors += [("d", T)] + [("e", S)] * (n - j)
    return factors, q


def iterate_majorization(x0, d, steps: int) -> IterationResult:
    """Alternate d-stochastic and doubly stochastic moves that push ``x0`` towards ``e_1``.

    One macro step is a product of cyclic right shifts (doubly stochastic)
    and a two-coordinate d-stochastic matrix acting on the first pair
    ``j, j+1`` with ``d_j > d_{j+1}``; it maps ``x`` to
    ``(1 - q) e_1 + q x`` with ``q = d_{j+1}/d_j``. If ``d`` never
    decreases between neighbours, the reversed problem is used and the
    result is rotated back so the target is still ``e_1``.

    ``distances[a]`` is ``|| |e_1><e_1| - diag(x^(a)) ||_1``. For a
    probability vector this equals ``2 (x_2 + ... + x_n)``, which is how it
    is evaluated: subtracting ``x_1`` from 1 would lose all relative
    accuracy once the distance is tiny.
    """
    d = check_weights(d)
    x0 = vector.check_vector(x0, "x0")
    n = d.size
    if x0.size != n:
        raise ShapeMismatch("x0 and d have different lengths")
    if np.min(x0) <= 0 or abs(x0.sum() - 1) > 1e-12:
        raise PreconditionViolated("x0 must be strictly positive with unit sum")
    if np.allclose(d, d[0], rtol=1e-12, atol=0):
        raise ConstantWeights("d is proportional to e; no d-stochastic move is available")

    down = np.where(d[:-1] > d[1:])[0]
    mirrored = down.size == 0
    if not mirrored:
        j = int(down[0])
        factors, q = _iteration_factors(d, j)
    else:
        R = np.eye(n)[::-1]
        dr = d[::-1]
        j = int(np.where(dr[:-1] > dr[1:])[0][0])
        inner, q = _iteration_factors(dr, j)
        S = _right_shift(n)
        factors = [("e", S.T)] + [(kind, R @ F @ R) for kind, F in inner] + [("e", S)]
        j = n - 2 - j
    M = np.eye(n)
    for _, F in factors:
        M = F @ M

    e1 = np.eye(n)[0]
    xs = [x0]
    for _ in range(steps):
        xs.append(M @ xs[-1])
    xs = np.array(xs)
    distances = 2 * xs[:, 1:].sum(axis=1)
    powers = q ** np.arange(steps + 1)
    closed = (1 - powers)[:, None] * e1[None, :] + powers[:, None] * x0[None, :]
    return IterationResult(xs, distances, float(q), j, mirrored, M, factors,
                           float(np.abs(xs - closed).max()))
