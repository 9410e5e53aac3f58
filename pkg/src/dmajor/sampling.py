"""Random matrices, states and maps for experiments and tests.

Every function takes an explicit ``numpy.random.Generator``.
"""
from __future__ import annotations

import numpy as np

from . import channels, linalg, vector
from .channels import ChoiMatrix, KrausSet
from .validation import hermitian_part


def ginibre(shape, rng: np.random.Generator) -> np.ndarray:
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    Q, R = np.linalg.qr(ginibre((n, n), rng))
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def random_hermitian(n: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    return scale * hermitian_part(ginibre((n, n), rng))


def random_state(n: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    G = ginibre((n, rank or n), rng)
    rho = G @ G.conj().T
    return hermitian_part(rho / np.trace(rho).real)


def random_pd(n: int, rng: np.random.Generator, floor: float = 0.1) -> np.ndarray:
    G = ginibre((n, n), rng)
    return hermitian_part(G @ G.conj().T / n + floor * np.eye(n))


def random_weights(n: int, rng: np.random.Generator, low: float = 0.2, high: float = 2.0) -> np.ndarray:
    return rng.uniform(low, high, size=n)


def _isometry_rows(n: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    """``n x cols`` matrix with orthonormal rows (``cols >= n``)."""
    Q, _ = np.linalg.qr(ginibre((cols, n), rng))
    return Q.conj().T


def random_kraus_channel(n: int, k: int, rng: np.random.Generator, n_kraus: int | None = None) -> KrausSet:
    """Random CPTP map ``C^{n x n} -> C^{k x k}`` as a Kraus set."""
    r = n_kraus or max(1, -(-n // k)) + 1
    r = max(r, -(-n // k))
    W = _isometry_rows(n, r * k, rng)
    return KrausSet(tuple(W[:, i * k:(i + 1) * k] for i in range(r)))


def random_channel(n: int, k: int, rng: np.random.Generator, n_kraus: int | None = None) -> ChoiMatrix:
    return channels.choi_from_kraus(random_kraus_channel(n, k, rng, n_kraus))


def random_cp_map(n: int, k: int, rng: np.random.Generator, n_kraus: int = 2) -> ChoiMatrix:
    return channels.choi_from_kraus([ginibre((n, k), rng) for _ in range(n_kraus)])


def random_non_sp_map(n: int, k: int, m: int, rng: np.random.Generator,
                      trace_preserving: bool = False, n_kraus: int | None = None) -> tuple[ChoiMatrix, np.ndarray]:
    """CP map whose Kraus operators all vanish on a random ``m``-dimensional subspace.

    Returns the Choi matrix and an orthonormal basis of that subspace. With
    ``trace_preserving`` the map is ``A -> V S(A) V^*`` for a random
    channel ``S`` into ``k - m`` dimensions and an isometry ``V`` onto the
    orthogonal complement.
    """
    U = random_unitary(k, rng)
    kernel, perp = U[:, :m], U[:, m:]
    if trace_preserving:
        inner = random_kraus_channel(n, k - m, rng, n_kraus)
        ops = [H @ perp.conj().T for H in inner]
    else:
        ops = [ginibre((n, k - m), rng) @ perp.conj().T for _ in range(n_kraus or 2)]
    return channels.choi_from_kraus(ops), kernel


def petz_recovery(S: ChoiMatrix, D: np.ndarray) -> ChoiMatrix:
    """``X -> D^{1/2} S^*(S(D)^{-1/2} X S(D)^{-1/2}) D^{1/2}``, which maps ``S(D)`` back to ``D``."""
    dual = channels.dual_map(S)
    SD = hermitian_part(S(D))
    root = linalg.sqrt_psd(D)
    inv_root = linalg.inv_sqrt_pd(SD)
    return channels.choi_from_map(
        lambda X: root @ dual(inv_root @ X @ inv_root) @ root, S.out_dim, S.in_dim)


def random_fixed_point_channel(d, rng: np.random.Generator, mix: float | None = None) -> ChoiMatrix:
    """Random channel with fixed point ``D = diag(d)``.

    Petz recovery composed with a random channel, mixed with the trace
    projection onto ``D / tr D``; ``mix > 0`` makes the Choi matrix
    positive definite.
    """
    d = np.asarray(d, dtype=float)
    n = d.size
    D = np.diag(d).astype(complex)
    S = random_channel(n, n, rng, n_kraus=int(rng.integers(1, n + 2)))
    T = channels.compose(petz_recovery(S, D), S)
    mix = rng.uniform(0.02, 0.3) if mix is None else mix
    return (1 - mix) * T + mix * channels.trace_projection(D / d.sum())


def _trace_norm_gap(A, B, d) -> float:
    """Smallest ``||B - tD||_1 - ||A - tD||_1`` over the whitened spectral breakpoints."""
    D = np.diag(d)
    s = 1 / np.sqrt(d)
    ts = np.concatenate([linalg.eigvalsh(s[:, None] * X * s[None, :]) for X in (A, B)])
    return min(linalg.trace_norm(B - t * D) - linalg.trace_norm(A - t * D) for t in ts)


def random_dmaj_pair(d, rng: np.random.Generator, feasible: bool, margin: float = 1e-2,
                     max_tries: int = 10_000) -> tuple[np.ndarray, np.ndarray]:
    """Hermitian ``(A, B)`` with a known answer to "is A D-majorized by B".

    Feasible pairs are ``A = T(B)`` for a random channel ``T`` fixing
    ``D = diag(d)``. Infeasible pairs have equal traces but break
    ``||A - tD||_1 <= ||B - tD||_1`` by more than ``margin`` for some ``t``,
    which rules out every such channel because channels contract the trace norm.
    """
    d = np.asarray(d, dtype=float)
    n = d.size
    B = random_hermitian(n, rng)
    if feasible:
        return random_fixed_point_channel(d, rng)(B), B
    for _ in range(max_tries):
        A = random_hermitian(n, rng, scale=rng.uniform(0.5, 2.0))
        A = A + (np.trace(B) - np.trace(A)).real / d.sum() * np.diag(d)
        if _trace_norm_gap(A, B, d) < -margin:
            return hermitian_part(A), B
    raise RuntimeError("could not sample an infeasible pair")


def random_diagonal_pair(d, rng: np.random.Generator, feasible: bool, margin: float = 1e-2,
                         max_tries: int = 10_000) -> tuple[np.ndarray, np.ndarray]:
    """Real vectors ``(x, y)`` with ``x = M y`` for a random d-stochastic ``M``, or with
    equal sums and some one-norm inequality broken by more than ``margin``."""
    d = np.asarray(d, dtype=float)
    n = d.size
    y = rng.normal(size=n)
    if feasible:
        return vector.random_d_stochastic(d, rng) @ y, y
    for _ in range(max_tries):
        x = rng.normal(size=n) * rng.uniform(0.5, 2.0)
        x += (y.sum() - x.sum()) / n
        res = vector.d_majorization_check(x, y, d)
        if min(res.worst_one_norm_margin, res.worst_positive_part_margin) < -margin:
            return x, y
    raise RuntimeError("could not sample an infeasible pair")
