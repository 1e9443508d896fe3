"""Epsilon-insensitive support vector regression with an RBF kernel.

The dual is solved by sequential minimal optimization over the doubled
variable set (one box-constrained pair per training point), picking the
maximal-violating pair each iteration and stopping once the KKT violation
drops below tolerance. Features are z-scored with training statistics
because the RBF kernel is scale-sensitive.

The SMO inner loop is one of the two hot kernels: a compiled version is
preferred at import, with the pure-numpy twin as fallback (or when
LEMPS_PURE_PYTHON is set).
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from . import _smo_python
from .linear.model import standardize_columns

python_smo = _smo_python.smo_solve
compiled_smo = None

try:
    from . import _smo_kernel

    compiled_smo = _smo_kernel.smo_solve
except ImportError:
    _smo_kernel = None

if compiled_smo is not None and not os.environ.get("LEMPS_PURE_PYTHON"):
    smo_solve = compiled_smo
    USING_COMPILED = True
else:
    smo_solve = python_smo
    USING_COMPILED = False


def rbf_kernel(x, x2, gamma: float) -> float:
    """exp(-gamma * ||x - x2||^2)."""
    if gamma <= 0:
        raise ValueError(f"gamma must be > 0, got {gamma}")
    x = np.asarray(x, dtype=np.float64)
    x2 = np.asarray(x2, dtype=np.float64)
    if x.shape != x2.shape:
        raise ValueError(f"vector shapes differ: {x.shape} vs {x2.shape}")
    d = x - x2
    return float(np.exp(-gamma * (d @ d)))


def _rbf_matrix(A, B, gamma):
    sq = (
        np.sum(A * A, axis=1)[:, None]
        + np.sum(B * B, axis=1)[None, :]
        - 2.0 * (A @ B.T)
    )
    np.maximum(sq, 0.0, out=sq)
    return np.exp(-gamma * sq)


@dataclass(frozen=True)
class SvrModel:
    """Signed dual coefficients over the support vectors plus a bias.

    Prediction contract: f(x) = bias + sum_i a_i * K(sv_i, x), with the
    kernel evaluated in standardized feature space.
    """

    support_indices: tuple
    dual_coefficients: np.ndarray
    bias: float
    gamma: float
    C: float
    epsilon: float
    stored_support_vectors: np.ndarray
    feature_means: np.ndarray
    feature_scales: np.ndarray
    converged: bool = True
    kkt_violation: float = 0.0

    def __post_init__(self):
        for arr in (self.dual_coefficients, self.stored_support_vectors,
                    self.feature_means, self.feature_scales):
            arr.setflags(write=False)

    @property
    def n_features(self) -> int:
        return self.feature_means.shape[0]

    def predict(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X.reshape(1, -1)
        if X.shape[1] != self.n_features:
            raise ValueError(
                f"model was trained on {self.n_features} features, got {X.shape[1]}"
            )
        out = np.full(X.shape[0], self.bias)
        if self.dual_coefficients.shape[0]:
            Z = (X - self.feature_means) / self.feature_scales
            out += _rbf_matrix(Z, self.stored_support_vectors, self.gamma) @ self.dual_coefficients
        return out


def fit_svr(X, y, C: float, gamma: float, epsilon: float = 0.01,
            tol: float = 1e-3, max_iter: int = 10_000,
            track_objective: bool = False):
    """Fit epsilon-SVR; returns SvrModel (and the objective trace if tracked)."""
    if C <= 0:
        raise ValueError(f"C must be > 0, got {C}")
    if gamma <= 0:
        raise ValueError(f"gamma must be > 0, got {gamma}")
    if epsilon < 0:
        raise ValueError(f"epsilon must be >= 0, got {epsilon}")
    if tol <= 0:
        raise ValueError(f"tol must be > 0, got {tol}")
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0] or X.shape[0] == 0:
        raise ValueError("X must be 2-D and y 1-D with matching, nonzero rows")

    Z, means, scales = standardize_columns(X)
    Z = np.ascontiguousarray(Z)
    K = _rbf_matrix(Z, Z, gamma)
    _, _, a, _, m, M, converged, violation, _, trace = smo_solve(
        np.ascontiguousarray(K), np.ascontiguousarray(y), float(C),
        float(epsilon), float(tol), int(max_iter), track_objective,
    )
    bias = 0.5 * (m + M)
    support = np.flatnonzero(a != 0.0)
    model = SvrModel(
        support_indices=tuple(int(i) for i in support),
        dual_coefficients=a[support].copy(),
        bias=float(bias),
        gamma=float(gamma),
        C=float(C),
        epsilon=float(epsilon),
        stored_support_vectors=Z[support].copy(),
        feature_means=means,
        feature_scales=scales,
        converged=converged,
        kkt_violation=float(violation),
    )
    if track_objective:
        return model, trace
    return model
