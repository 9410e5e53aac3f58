"""Input validation helpers shared by every module.

These mirror the ``check_array`` family from scikit-learn: they coerce
their argument to a numpy array, verify shape and finiteness, and raise
one of the package exceptions on failure.
"""
from __future__ import annotations

import numpy as np

from .exceptions import (
    LengthMismatch,
    NonHermitianInput,
    NonpositiveWeight,
    NotAState,
    ShapeMismatch,
)

DEFAULT_TOL = 1e-9


def check_matrix(M, name: str = "matrix", square: bool = True) -> np.ndarray:
    """Return ``M`` as a finite complex 2-d array."""
    M = np.asarray(M)
    if M.ndim != 2:
        raise ShapeMismatch(f"{name} must be 2-dimensional, got shape {M.shape}")
    if square and M.shape[0] != M.shape[1]:
        raise ShapeMismatch(f"{name} must be square, got shape {M.shape}")
    M = M.astype(complex)
    if not np.all(np.isfinite(M)):
        raise ShapeMismatch(f"{name} contains NaN or Inf")
    return M


def scale_of(M) -> float:
    """Tolerance scale ``max(1, ||M||)`` using the spectral norm."""
    M = np.asarray(M)
    if M.size == 0:
        return 1.0
    return max(1.0, float(np.linalg.norm(M, 2)))


def hermitian_part(M: np.ndarray) -> np.ndarray:
    return (M + M.conj().T) / 2


def is_hermitian(M, tol: float = DEFAULT_TOL) -> bool:
    M = np.asarray(M)
    return float(np.linalg.norm(M - M.conj().T)) <= tol * scale_of(M)


def check_hermitian(M, tol: float = DEFAULT_TOL, name: str = "matrix") -> np.ndarray:
    """Validate hermiticity and return the exactly hermitian part."""
    M = check_matrix(M, name)
    if not is_hermitian(M, tol):
        dev = float(np.linalg.norm(M - M.conj().T))
        raise NonHermitianInput(f"{name} is not hermitian (||M - M*||_F = {dev:.3g})")
    return hermitian_part(M)


def check_vector(x, name: str = "vector") -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ShapeMismatch(f"{name} must be 1-dimensional, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ShapeMismatch(f"{name} contains NaN or Inf")
    return x


def check_same_length(*vectors) -> int:
    lengths = {len(v) for v in vectors}
    if len(lengths) != 1:
        raise LengthMismatch(f"vectors have different lengths {sorted(lengths)}")
    return lengths.pop()


def check_weights(d, name: str = "d") -> np.ndarray:
    """A strictly positive weight vector."""
    d = check_vector(d, name)
    if d.size == 0 or np.min(d) <= 0:
        raise NonpositiveWeight(f"{name} must have strictly positive entries")
    return d


def check_state(rho, tol: float = DEFAULT_TOL, name: str = "rho") -> np.ndarray:
    """A density matrix: hermitian, PSD and of unit trace, all within ``tol``."""
    try:
        rho = check_hermitian(rho, tol, name)
    except NonHermitianInput as exc:
        raise NotAState(str(exc)) from exc
    if abs(np.trace(rho).real - 1.0) > tol * rho.shape[0]:
        raise NotAState(f"{name} has trace {np.trace(rho).real:.12g}, expected 1")
    lam_min = float(np.linalg.eigvalsh(rho)[0])
    if lam_min < -tol:
        raise NotAState(f"{name} has negative eigenvalue {lam_min:.3g}")
    return rho
