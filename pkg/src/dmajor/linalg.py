"""Dense complex linear algebra on small matrices.

The spectral work in the rest of the package goes through LAPACK
(``numpy.linalg.eigh``) because it sits inside iterative solvers.
:func:`hermitian_eig` additionally offers a self-contained cyclic Jacobi
solver for complex hermitian matrices, which is the default and is
cross-checked against LAPACK in the test-suite.
"""
from __future__ import annotations

import enum
from typing import Callable, NamedTuple

import numpy as np

from .exceptions import NoConvergence, NotPSD
from .validation import DEFAULT_TOL, check_hermitian, check_matrix, hermitian_part

JACOBI_OFF_TOL = 1e-14
JACOBI_MAX_SWEEPS = 100


class HermitianEig(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


class PSDStatus(enum.Enum):
    POSITIVE_DEFINITE = "PositiveDefinite"
    POSITIVE_SEMIDEFINITE = "PositiveSemidefinite"
    INDEFINITE = "Indefinite"


class PSDCheck(NamedTuple):
    status: PSDStatus
    min_eigenvalue: float

    @property
    def is_psd(self) -> bool:
        return self.status is not PSDStatus.INDEFINITE

    @property
    def is_pd(self) -> bool:
        return self.status is PSDStatus.POSITIVE_DEFINITE


def _off_norm(A: np.ndarray) -> float:
    off = A - np.diag(np.diag(A))
    return float(np.linalg.norm(off))


def jacobi_eigh(M: np.ndarray, off_tol: float = JACOBI_OFF_TOL,
                max_sweeps: int = JACOBI_MAX_SWEEPS) -> tuple[np.ndarray, np.ndarray, int]:
    """Cyclic Jacobi diagonalisation of a hermitian matrix.

    Each rotation first removes the phase of ``A[p, q]`` with a diagonal
    unitary and then applies the real symmetric Jacobi rotation. Returns
    unsorted eigenvalues, eigenvectors (columns) and the sweep count.
    """
    A = np.array(M, dtype=complex)
    n = A.shape[0]
    V = np.eye(n, dtype=complex)
    scale = max(1.0, float(np.linalg.norm(A)))
    threshold = off_tol * scale
    sweeps = 0
    while _off_norm(A) > threshold:
        if sweeps >= max_sweeps:
            raise NoConvergence(f"Jacobi did not converge in {max_sweeps} sweeps")
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                r = abs(apq)
                if r < 1e-300:
                    continue
                phase = apq / r
                app, aqq = A[p, p].real, A[q, q].real
                theta = (aqq - app) / (2.0 * r)
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0)) if theta != 0 else 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                # G = diag(1, conj(phase)) @ [[c, s], [-s, c]]
                G = np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]])
                idx = [p, q]
                A[:, idx] = A[:, idx] @ G
                A[idx, :] = G.conj().T @ A[idx, :]
                V[:, idx] = V[:, idx] @ G
                A[p, q] = A[q, p] = 0.0
                A[p, p] = A[p, p].real
                A[q, q] = A[q, q].real
    return np.diag(A).real.copy(), V, sweeps


def hermitian_eig(M, tol: float = DEFAULT_TOL, backend: str = "jacobi") -> HermitianEig:
    """Eigen-decomposition of a hermitian matrix, eigenvalues ascending.

    ``backend`` is ``"jacobi"`` (the built-in solver) or ``"lapack"``.
    Ties keep the order produced by the sweep (stable sort).
    """
    M = check_hermitian(M, tol)
    if backend == "lapack":
        w, V = np.linalg.eigh(M)
        return HermitianEig(w, V)
    if backend != "jacobi":
        raise ValueError(f"unknown backend {backend!r}")
    w, V, _ = jacobi_eigh(M)
    order = np.argsort(w, kind="stable")
    return HermitianEig(w[order], V[:, order])


def eigh(M: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """LAPACK eigen-decomposition of the hermitian part of ``M``; no checks."""
    return np.linalg.eigh(hermitian_part(M))


def eigvalsh(M: np.ndarray) -> np.ndarray:
    return np.linalg.eigvalsh(hermitian_part(M))


def trace_norm(M) -> float:
    """Sum of singular values.

    Hermitian input uses the eigenvalues; anything else goes through the
    SVD, which keeps small singular values accurate.
    """
    M = check_matrix(M)
    if np.allclose(M, M.conj().T, rtol=0, atol=1e-14 * max(1.0, float(np.abs(M).max(initial=0)))):
        return float(np.sum(np.abs(eigvalsh(M))))
    return float(np.sum(np.linalg.svd(M, compute_uv=False)))


def psd_check(M, tol: float = DEFAULT_TOL) -> PSDCheck:
    """Classify a hermitian matrix by its smallest eigenvalue.

    Thresholds are ``tol * max(1, ||M||)`` with the spectral norm.
    """
    M = check_hermitian(M, tol)
    w = eigvalsh(M)
    scale = max(1.0, float(np.max(np.abs(w))))
    lam = float(w[0])
    if lam > tol * scale:
        status = PSDStatus.POSITIVE_DEFINITE
    elif lam >= -tol * scale:
        status = PSDStatus.POSITIVE_SEMIDEFINITE
    else:
        status = PSDStatus.INDEFINITE
    return PSDCheck(status, lam)


def psd_project(M, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Frobenius-nearest PSD matrix: clip negative eigenvalues to zero."""
    M = check_hermitian(M, tol)
    return _psd_project(M)


def _psd_project(M: np.ndarray) -> np.ndarray:
    w, V = eigh(M)
    w = np.clip(w, 0.0, None)
    return hermitian_part((V * w) @ V.conj().T)


def apply_function(M: np.ndarray, f: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Functional calculus ``f(M)`` for hermitian ``M``."""
    w, V = eigh(M)
    return hermitian_part((V * f(w)) @ V.conj().T)


def sqrt_psd(M, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Principal square root of a PSD matrix.

    Eigenvalues in ``[-tol*scale, 0)`` are treated as zero.
    """
    M = check_hermitian(M, tol)
    w, V = eigh(M)
    scale = max(1.0, float(np.max(np.abs(w))))
    if w[0] < -tol * scale:
        raise NotPSD(f"matrix has eigenvalue {w[0]:.3g} < 0")
    w = np.sqrt(np.clip(w, 0.0, None))
    return hermitian_part((V * w) @ V.conj().T)


def inv_sqrt_pd(M: np.ndarray) -> np.ndarray:
    w, V = eigh(M)
    if w[0] <= 0:
        raise NotPSD("matrix is not positive definite")
    return hermitian_part((V / np.sqrt(w)) @ V.conj().T)


def kernel_basis(M: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis (columns) of the numerical kernel of hermitian ``M``.

    An eigenvector belongs to the kernel when its eigenvalue is at most
    ``tol * max(1, ||M||)`` in absolute value.
    """
    w, V = eigh(M)
    scale = max(1.0, float(np.max(np.abs(w))) if w.size else 1.0)
    return V[:, np.abs(w) <= tol * scale]


def subspace_angle(P: np.ndarray, Q: np.ndarray) -> float:
    """Largest principal angle between the column spans of ``P`` and ``Q``.

    Both arguments must have orthonormal columns. Returns ``pi/2`` when the
    dimensions differ. Computed from sines, which stay accurate for tiny
    angles.
    """
    if P.shape[1] != Q.shape[1]:
        return float(np.pi / 2)
    if P.shape[1] == 0:
        return 0.0
    residual = Q - P @ (P.conj().T @ Q)
    s = np.linalg.svd(residual, compute_uv=False)
    return float(np.arcsin(min(1.0, float(s.max()))))


def null_space(M: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Right null space of a (possibly rectangular) matrix via the SVD."""
    M = np.asarray(M, dtype=complex)
    _, s, Vh = np.linalg.svd(M)
    scale = max(1.0, float(s.max()) if s.size else 1.0)
    rank = int(np.sum(s > tol * scale))
    return Vh[rank:].conj().T
