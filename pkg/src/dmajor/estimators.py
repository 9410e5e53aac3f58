"""scikit-learn style wrappers.

:class:`DMajorizationClassifier` labels stacked ``(A, B)`` pairs by whether
``A`` is D-majorized by ``B``; :class:`ChannelEstimator` fits a channel with
``T(B) = A`` and then applies it to new matrices.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from . import matrix as mm
from .exceptions import ShapeMismatch
from .solver import SolverParams, Verdict
from .validation import DEFAULT_TOL, check_weights


def _pairs(X) -> np.ndarray:
    X = np.asarray(X, dtype=complex)
    if X.ndim == 3 and X.shape[0] == 2:
        X = X[None]
    if X.ndim != 4 or X.shape[1] != 2 or X.shape[2] != X.shape[3]:
        raise ShapeMismatch(f"expected pairs of shape (n_samples, 2, n, n), got {X.shape}")
    return X


class DMajorizationClassifier(ClassifierMixin, BaseEstimator):
    """Predict ``A <_D B`` for each pair ``X[i] = (A, B)``.

    ``d`` is a weight vector or a positive definite matrix. ``fit`` only
    validates ``d`` against the data; the decision itself needs no training.
    """

    def __init__(self, d=None, method: str = "auto", tol: float = DEFAULT_TOL, max_iter: int = 50_000):
        self.d = d
        self.method = method
        self.tol = tol
        self.max_iter = max_iter

    def fit(self, X, y=None):
        X = _pairs(X)
        D = np.asarray(self.d)
        size = D.shape[0] if D.ndim else 0
        if size != X.shape[2]:
            raise ShapeMismatch(f"d has size {size}, matrices are {X.shape[2]}x{X.shape[2]}")
        if D.ndim == 1:
            check_weights(D)
        self.n_features_in_ = X.shape[2]
        self.classes_ = np.array([False, True])
        return self

    def decide(self, X) -> list[mm.Decision]:
        check_is_fitted(self, "classes_")
        params = SolverParams(max_iter=self.max_iter)
        return [mm.decide(mm.DMajInstance.create(A, B, self.d, tol=self.tol), self.method, params, self.tol)
                for A, B in _pairs(X)]

    def predict_verdict(self, X) -> np.ndarray:
        """Verdict strings, including ``"Undecided"`` when the solver runs out of budget."""
        return np.array([dec.verdict.value for dec in self.decide(X)])

    def predict(self, X) -> np.ndarray:
        return np.array([dec.verdict is Verdict.FEASIBLE for dec in self.decide(X)])


class ChannelEstimator(TransformerMixin, BaseEstimator):
    """Fit a channel with ``T(B) = A``; ``transform`` applies it.

    ``fit(B, A)`` follows the ``fit(X, y)`` convention: ``X`` is the input
    matrix ``B`` and ``y`` the target ``A``. ``omega`` optionally fixes the
    image of the kernel vector of a singular ``B``.
    """

    def __init__(self, omega=None, tol: float = DEFAULT_TOL):
        self.omega = omega
        self.tol = tol

    def fit(self, X, y):
        self.choi_ = mm.construct_channel_pair(y, X, self.omega, self.tol)
        self.n_features_in_ = self.choi_.in_dim
        return self

    def transform(self, X) -> np.ndarray:
        check_is_fitted(self, "choi_")
        X = np.asarray(X, dtype=complex)
        if X.ndim == 2:
            return self.choi_(X)
        return np.stack([self.choi_(x) for x in X])
