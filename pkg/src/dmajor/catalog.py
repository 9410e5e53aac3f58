"""Small hand-written maps and instances with known properties.

Each builder returns a :class:`ChoiMatrix` (or the matrices of an
instance) so tests and the ``reproduce`` command can check the
documented properties numerically.
"""
from __future__ import annotations

import numpy as np

from .channels import ChoiMatrix, choi_from_map, unitary_channel

R2 = np.sqrt(2.0)


def leaky_qubit_channel() -> ChoiMatrix:
    """``diag(a11 + a22/2, a22/2)``: channel, strictly positive, fixed points ``x |e_1><e_1|`` only."""
    def apply(A):
        return np.diag([A[0, 0] + A[1, 1] / 2, A[1, 1] / 2])
    return choi_from_map(apply, 2, 2)


def rank_changing_channel() -> ChoiMatrix:
    """``diag(a22 + a33, a11/2, a11/2)``: fixes ``diag(2, 1, 1)`` yet raises the rank of
    ``|e_1><e_1|`` and lowers that of ``|e_2><e_2| + |e_3><e_3|``."""
    def apply(A):
        return np.diag([A[1, 1] + A[2, 2], A[0, 0] / 2, A[0, 0] / 2])
    return choi_from_map(apply, 3, 3)


def near_identity_nonpositive(m: int) -> ChoiMatrix:
    """Trace preserving but not positive; tends to the identity as ``m`` grows.

    Diagonal entries become ``(1 + 1/m) a_ii - a_jj / m``; off-diagonal entries are kept.
    """
    if m < 1:
        raise ValueError("m must be a positive integer")

    def apply(A):
        out = np.array(A, dtype=complex)
        out[0, 0] = (1 + 1 / m) * A[0, 0] - A[1, 1] / m
        out[1, 1] = (1 + 1 / m) * A[1, 1] - A[0, 0] / m
        return out
    return choi_from_map(apply, 2, 2)


def compressing_qutrit_channel() -> ChoiMatrix:
    """Channel on 3x3 matrices whose image lives in the top-left 2x2 corner.

    Choi spectrum ``{2, 1, 0 (7 times)}``; ``T(1) = diag(1, 2, 0)``, so not strictly positive.
    """
    def apply(A):
        out = np.zeros((3, 3), dtype=complex)
        out[0, 0] = A[0, 0]
        out[0, 1] = 1j / R2 * (A[0, 1] + A[0, 2])
        out[1, 0] = -1j / R2 * (A[1, 0] + A[2, 0])
        out[1, 1] = A[1, 1] + A[2, 2]
        return out
    return choi_from_map(apply, 3, 3)


def compressing_qutrit_dual() -> ChoiMatrix:
    """Hand-derived adjoint of :func:`compressing_qutrit_channel` (w.r.t. ``tr(X^* Y)`` pairing ``tr(T(A) B)``)."""
    def apply(B):
        out = np.zeros((3, 3), dtype=complex)
        out[0, 0] = B[0, 0]
        out[0, 1] = out[0, 2] = -1j / R2 * B[0, 1]
        out[1, 0] = out[2, 0] = 1j / R2 * B[1, 0]
        out[1, 1] = out[2, 2] = B[1, 1]
        return out
    return choi_from_map(apply, 3, 3)


def swap_channel() -> ChoiMatrix:
    """``rho -> sigma_x rho sigma_x``: unitary, strictly positive, at distance 2 from the identity."""
    return unitary_channel(np.array([[0, 1], [1, 0]], dtype=complex))


def heinosaari_triple() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``(A, B, D)`` with ``A = B^T``: every trace-norm inequality holds, yet no
    channel fixing ``D`` maps ``B`` to ``A``."""
    A = np.array([[2, 1, 0], [1, 2, -1j], [0, 1j, 2]], dtype=complex)
    B = np.array([[2, 1, 0], [1, 2, 1j], [0, -1j, 2]], dtype=complex)
    D = np.array([[2, 1, 0], [1, 2, 1], [0, 1, 2]], dtype=complex)
    return A, B, D


MAPS = {
    "leaky-qubit": leaky_qubit_channel,
    "rank-changing": rank_changing_channel,
    "compressing-qutrit": compressing_qutrit_channel,
    "compressing-qutrit-dual": compressing_qutrit_dual,
    "swap": swap_channel,
}
