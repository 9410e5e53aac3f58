"""Linear maps between matrix algebras and their strict positivity.

A map ``T: C^{n x n} -> C^{k x k}`` is stored through its Choi matrix,
the ``n x n`` grid of ``k x k`` blocks ``T(|e_i><e_j|)``.

Kraus convention
----------------
Kraus operators are ``n x k`` matrices acting as

    T(A) = sum_i K_i^* A K_i,

so ``T(1) = sum_i K_i^* K_i`` and trace preservation reads
``sum_i K_i K_i^* = 1_n``. Most texts use the adjoint convention
``K_i A K_i^*``; convert with ``K -> K.conj().T``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

from . import linalg
from .exceptions import (
    DimensionMismatch,
    EmptyKrausSet,
    IsStrictlyPositive,
    NotCP,
    ProbeNotPD,
    ShapeMismatch,
)
from .validation import DEFAULT_TOL, check_hermitian, check_matrix, hermitian_part, is_hermitian


@dataclass(frozen=True, eq=False)
class ChoiMatrix:
    """Choi matrix of a linear map ``C^{n x n} -> C^{k x k}``."""

    in_dim: int
    out_dim: int
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        size = self.in_dim * self.out_dim
        if m.shape != (size, size):
            raise ShapeMismatch(
                f"Choi matrix for n={self.in_dim}, k={self.out_dim} must be {size}x{size}, got {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def blocks(self) -> np.ndarray:
        """View of shape ``(n, k, n, k)`` with ``blocks[i, :, j, :] = T(|e_i><e_j|)``."""
        n, k = self.in_dim, self.out_dim
        return self.matrix.reshape(n, k, n, k)

    def block(self, i: int, j: int) -> np.ndarray:
        return self.blocks[i, :, j, :]

    def __call__(self, A) -> np.ndarray:
        return apply_choi(self, A)

    def __add__(self, other: "ChoiMatrix") -> "ChoiMatrix":
        _check_same_dims(self, other)
        return ChoiMatrix(self.in_dim, self.out_dim, self.matrix + other.matrix)

    def __mul__(self, scalar) -> "ChoiMatrix":
        return ChoiMatrix(self.in_dim, self.out_dim, scalar * self.matrix)

    __rmul__ = __mul__

    def __repr__(self):
        return f"ChoiMatrix(in_dim={self.in_dim}, out_dim={self.out_dim})"


@dataclass(frozen=True)
class KrausSet:
    """Kraus operators, each ``n x k``, for ``T(A) = sum K^* A K``."""

    operators: tuple

    def __post_init__(self):
        ops = tuple(np.array(K, dtype=complex) for K in self.operators)
        if ops and len({K.shape for K in ops}) != 1:
            raise ShapeMismatch("Kraus operators must share one shape")
        object.__setattr__(self, "operators", ops)

    def __len__(self):
        return len(self.operators)

    def __iter__(self):
        return iter(self.operators)

    @property
    def in_dim(self) -> int:
        return self.operators[0].shape[0]

    @property
    def out_dim(self) -> int:
        return self.operators[0].shape[1]

    def __call__(self, A) -> np.ndarray:
        A = np.asarray(A, dtype=complex)
        return sum(K.conj().T @ A @ K for K in self.operators)


class CheckResult(NamedTuple):
    ok: bool
    deviation: float


class StrictPositivity(NamedTuple):
    strictly_positive: bool
    m: int
    min_eigenvalue: float


class UniversalKernel(NamedTuple):
    basis: np.ndarray
    consistent: bool
    max_angle: float


@dataclass
class BlockFormReport:
    m: int
    U: np.ndarray
    pi: np.ndarray
    kernel_basis: np.ndarray
    max_leak: float
    verified: bool


class DistanceEstimate(NamedTuple):
    lower: float
    upper: float
    state: np.ndarray


def _check_same_dims(C1: ChoiMatrix, C2: ChoiMatrix) -> None:
    if (C1.in_dim, C1.out_dim) != (C2.in_dim, C2.out_dim):
        raise DimensionMismatch("Choi matrices have different dimensions")


def _matrix_unit(n: int, i: int, j: int) -> np.ndarray:
    E = np.zeros((n, n), dtype=complex)
    E[i, j] = 1.0
    return E


# -- constructors -----------------------------------------------------------

def choi_from_map(apply: Callable[[np.ndarray], np.ndarray], n: int, k: int) -> ChoiMatrix:
    """Evaluate ``apply`` on all matrix units; ``apply`` must be linear."""
    C = np.zeros((n, k, n, k), dtype=complex)
    for i in range(n):
        for j in range(n):
            C[i, :, j, :] = apply(_matrix_unit(n, i, j))
    return ChoiMatrix(n, k, C.reshape(n * k, n * k))


def choi_from_kraus(kraus) -> ChoiMatrix:
    if not isinstance(kraus, KrausSet):
        kraus = KrausSet(tuple(kraus))
    if len(kraus) == 0:
        raise EmptyKrausSet("need at least one Kraus operator")
    n, k = kraus.in_dim, kraus.out_dim
    vecs = np.array([K.conj().reshape(n * k) for K in kraus])
    return ChoiMatrix(n, k, vecs.T @ vecs.conj())


def identity_channel(n: int) -> ChoiMatrix:
    return choi_from_kraus([np.eye(n)])


def unitary_channel(U) -> ChoiMatrix:
    """Choi of ``X -> U X U^*``."""
    U = check_matrix(U, "U")
    return choi_from_kraus([U.conj().T])


def trace_projection(rho, n: int | None = None) -> ChoiMatrix:
    """Choi of ``X -> tr(X) rho``; ``n`` defaults to the size of ``rho``."""
    rho = check_matrix(rho, "rho")
    n = rho.shape[0] if n is None else n
    return ChoiMatrix(n, rho.shape[0], np.kron(np.eye(n), rho))


def depolarizing_channel(n: int, p: float) -> ChoiMatrix:
    """``X -> (1-p) X + p tr(X) 1/n``."""
    return (1 - p) * identity_channel(n) + p * trace_projection(np.eye(n) / n)


def transposition_map(n: int) -> ChoiMatrix:
    return choi_from_map(lambda A: A.T, n, n)


def compose(second: ChoiMatrix, first: ChoiMatrix) -> ChoiMatrix:
    """Choi of ``second o first``."""
    if first.out_dim != second.in_dim:
        raise DimensionMismatch("output of the first map must match input of the second")
    return choi_from_map(lambda A: apply_choi(second, apply_choi(first, A)), first.in_dim, second.out_dim)


def conjugate_output(C: ChoiMatrix, U) -> ChoiMatrix:
    """Choi of ``A -> U T(A) U^*``."""
    U = check_matrix(U, "U")
    n, k = C.in_dim, C.out_dim
    W = np.kron(np.eye(n), U)
    return ChoiMatrix(n, k, W @ C.matrix @ W.conj().T)


# -- core operations --------------------------------------------------------

def apply_choi(C: ChoiMatrix, A) -> np.ndarray:
    """``T(A) = sum_ij A_ij T(|e_i><e_j|)``."""
    A = np.asarray(A, dtype=complex)
    if A.shape != (C.in_dim, C.in_dim):
        raise ShapeMismatch(f"input must be {C.in_dim}x{C.in_dim}, got {A.shape}")
    return np.einsum("ij,iajb->ab", A, C.blocks)


def kraus_from_choi(C: ChoiMatrix, tol: float = DEFAULT_TOL) -> KrausSet:
    """Kraus operators from the scaled eigenvectors of a PSD Choi matrix.

    Eigenvalues up to ``tol * max(1, ||C||)`` are dropped.
    """
    check = linalg.psd_check(C.matrix, tol)
    if not check.is_psd:
        raise NotCP(f"Choi matrix has eigenvalue {check.min_eigenvalue:.3g}")
    w, V = linalg.eigh(C.matrix)
    scale = max(1.0, float(np.max(np.abs(w))))
    keep = w > tol * scale
    ops = [np.sqrt(lam) * v.reshape(C.in_dim, C.out_dim).conj()
           for lam, v in zip(w[keep][::-1], V[:, keep].T[::-1])]
    return KrausSet(tuple(ops))


def is_cp(C: ChoiMatrix, tol: float = DEFAULT_TOL) -> CheckResult:
    """Complete positivity; ``deviation`` is the smallest Choi eigenvalue."""
    if not is_hermitian(C.matrix, tol):
        return CheckResult(False, float("nan"))
    check = linalg.psd_check(C.matrix, tol)
    return CheckResult(check.is_psd, check.min_eigenvalue)


def is_tp(C: ChoiMatrix, tol: float = DEFAULT_TOL) -> CheckResult:
    """Trace preservation: ``tr T(|e_i><e_j|) = delta_ij``."""
    traces = np.einsum("iaja->ij", C.blocks)
    dev = float(np.max(np.abs(traces - np.eye(C.in_dim))))
    return CheckResult(dev <= tol, dev)


def image_of_identity(C: ChoiMatrix) -> np.ndarray:
    return hermitian_part(np.einsum("iaib->ab", C.blocks))


def strict_positivity_check(C: ChoiMatrix, tol: float = DEFAULT_TOL) -> StrictPositivity:
    """Decide strict positivity of a positive map from ``T(1)``.

    Positivity of the map itself is the caller's responsibility.
    """
    T1 = image_of_identity(C)
    check = linalg.psd_check(T1, tol)
    if check.is_pd:
        return StrictPositivity(True, 0, check.min_eigenvalue)
    m = linalg.kernel_basis(T1, tol).shape[1]
    return StrictPositivity(False, max(m, 1), check.min_eigenvalue)


def universal_kernel(C: ChoiMatrix, probes: Sequence, tol: float = DEFAULT_TOL,
                     angle_tol: float = 1e-7) -> UniversalKernel:
    """Kernel of ``T(1)`` and whether every probe ``X > 0`` yields the same kernel."""
    basis = linalg.kernel_basis(image_of_identity(C), tol)
    worst = 0.0
    for X in probes:
        X = check_hermitian(X, tol, "probe")
        if not linalg.psd_check(X, tol).is_pd:
            raise ProbeNotPD("probe is not positive definite")
        K = linalg.kernel_basis(hermitian_part(apply_choi(C, X)), tol)
        worst = max(worst, linalg.subspace_angle(basis, K))
    return UniversalKernel(basis, worst < angle_tol, worst)


def kraus_kernel_intersection(kraus, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of the common kernel of all Kraus operators.

    Uses ``ker(sum K^* K)``, which equals the intersection.
    """
    ops = list(kraus)
    if not ops:
        raise EmptyKrausSet("need at least one Kraus operator")
    T1 = sum(K.conj().T @ K for K in ops)
    return linalg.kernel_basis(T1, tol)


def block_form_decomposition(C: ChoiMatrix, tol: float = DEFAULT_TOL) -> BlockFormReport:
    """Unitary compression of a positive, non strictly positive map.

    ``U`` sends ``e_{k+1-j}`` to the ``j``-th kernel vector of ``T(1)``; the
    remaining columns are the other eigenvectors of ``T(1)`` in ascending
    order. ``pi`` projects onto the first ``k - m`` columns of ``U``.
    """
    k = C.out_dim
    T1 = image_of_identity(C)
    w, V = linalg.eigh(T1)
    scale = max(1.0, float(np.max(np.abs(w))))
    in_kernel = np.abs(w) <= tol * scale
    m = int(np.sum(in_kernel))
    if m == 0:
        raise IsStrictlyPositive("T(1) is positive definite; there is no block form")
    psi = V[:, in_kernel]
    rest = V[:, ~in_kernel]
    U = np.zeros((k, k), dtype=complex)
    U[:, : k - m] = rest
    for j in range(m):
        U[:, k - 1 - j] = psi[:, j]
    P = U[:, : k - m]
    pi = P @ P.conj().T

    n = C.in_dim
    leak = 0.0
    for i in range(n):
        for j in range(n):
            img = U.conj().T @ C.block(i, j) @ U
            leak = max(leak, float(np.abs(img[k - m:, :]).max(initial=0.0)),
                       float(np.abs(img[:, k - m:]).max(initial=0.0)))
    cscale = max(1.0, float(np.abs(C.matrix).max()))
    return BlockFormReport(m, U, pi, psi, leak, leak <= tol * cscale)


def dual_map(C: ChoiMatrix) -> ChoiMatrix:
    """Choi of the dual map, ``tr(T(A) B) = tr(A T^*(B))``."""
    dual = C.blocks.transpose(3, 2, 1, 0)
    return ChoiMatrix(C.out_dim, C.in_dim, dual.reshape(C.in_dim * C.out_dim, C.in_dim * C.out_dim))


def induced_norm_bound(C: ChoiMatrix) -> float:
    """Trace-norm operator norm of a positive map, ``||T^*(1)||_inf``."""
    T_dual_one = image_of_identity(dual_map(C))
    return float(np.max(np.abs(linalg.eigvalsh(T_dual_one))))


def _pure(psi: np.ndarray) -> np.ndarray:
    return np.outer(psi, psi.conj())


def _identity_gap(C: ChoiMatrix, psi: np.ndarray) -> float:
    P = _pure(psi)
    return float(np.sum(np.abs(linalg.eigvalsh(apply_choi(C, P) - P))))


def distance_to_identity(C: ChoiMatrix, n_samples: int = 2000, n_starts: int = 10,
                         n_steps: int = 50, seed: int = 0) -> DistanceEstimate:
    """Bounds on ``||T - id||`` in the trace-norm operator norm.

    The lower bound maximises ``||T(P) - P||_1`` over pure states ``P``:
    random unit vectors plus the eigenvectors of ``T(1)``, followed by
    projected gradient ascent from the best ``n_starts`` candidates. The
    upper bound is ``||T|| + 1`` with ``||T|| = ||T^*(1)||_inf``, valid
    for positive maps.
    """
    if C.in_dim != C.out_dim:
        raise DimensionMismatch("distance to the identity needs n == k")
    n = C.in_dim
    rng = np.random.default_rng(seed)
    cands = rng.normal(size=(n_samples, n)) + 1j * rng.normal(size=(n_samples, n))
    _, V = linalg.eigh(image_of_identity(C))
    cands = np.vstack([V.T, cands])
    cands /= np.linalg.norm(cands, axis=1, keepdims=True)
    values = np.array([_identity_gap(C, psi) for psi in cands])

    dual = dual_map(C)
    order = np.argsort(-values, kind="stable")[:n_starts]
    best_val, best_psi = float(values[order[0]]), cands[order[0]]
    for idx in order:
        psi, val, step = cands[idx], float(values[idx]), 0.5
        for _ in range(n_steps):
            P = _pure(psi)
            w, W = linalg.eigh(apply_choi(C, P) - P)
            S = (W * np.sign(w)) @ W.conj().T
            grad = (apply_choi(dual, S) - S) @ psi
            grad -= np.vdot(psi, grad) * psi
            if np.linalg.norm(grad) < 1e-14:
                break
            while step > 1e-12:
                trial = psi + step * grad
                trial /= np.linalg.norm(trial)
                tval = _identity_gap(C, trial)
                if tval > val:
                    psi, val = trial, tval
                    step *= 1.5
                    break
                step /= 2
            else:
                break
        if val > best_val:
            best_val, best_psi = val, psi
    upper = induced_norm_bound(C) + 1.0
    return DistanceEstimate(best_val, upper, best_psi)


def sp_density_sequence(C: ChoiMatrix, m: int) -> ChoiMatrix:
    """``(1 - 1/m) T + (1/m) id``, strictly positive for every positive ``T``."""
    if C.in_dim != C.out_dim:
        raise DimensionMismatch("mixing with the identity needs n == k")
    if m < 1:
        raise ValueError("m must be a positive integer")
    return (1 - 1 / m) * C + (1 / m) * identity_channel(C.in_dim)
