"""Penalized least-squares fits: OLS, ridge, and coordinate-descent elastic net.

Objectives follow the usual conventions: ridge penalizes the plain residual
sum of squares (||Xw - y||^2 + alpha * ||w||^2) while LASSO and elastic net
scale the loss by 1/(2 n), so EN with l1_ratio 0 at strength alpha equals
ridge at strength alpha * n.
"""

from __future__ import annotations

import numpy as np

from . import backend
from .model import LinearModel, RegPath, standardize_columns


def soft_threshold(z: float, t: float) -> float:
    """sign(z) * max(|z| - t, 0)."""
    if t < 0:
        raise ValueError(f"threshold must be >= 0, got {t}")
    if z > t:
        return z - t
    if z < -t:
        return z + t
    return 0.0


def _prepare(X, y, standardize):
    """Validate shapes and move to the fitting space.

    Returns (X_fortran, y_centered, means, scales, intercept). With
    standardization off, the fitting space is the raw space and the
    intercept is fixed at zero.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError(f"X must be 2-D, got ndim={X.ndim}")
    if y.ndim != 1 or y.shape[0] != X.shape[0]:
        raise ValueError(f"y must be 1-D with {X.shape[0]} entries")
    if X.shape[0] < 1 or X.shape[1] < 1:
        raise ValueError("X must have at least one row and one column")
    if standardize:
        X_std, means, scales = standardize_columns(X)
        intercept = float(y.mean())
        return X_std, y - intercept, means, scales, intercept
    p = X.shape[1]
    return np.asfortranarray(X), y.copy(), np.zeros(p), np.ones(p), 0.0


def _zero_constant_columns(w, Xf, standardize):
    # standardized constant columns are identically zero; pin their
    # coefficients to exact zero rather than lstsq noise
    if standardize:
        w[~np.any(Xf != 0.0, axis=0)] = 0.0
    return w


def fit_ols(X, y, standardize: bool = True) -> LinearModel:
    """Minimum-norm least-squares fit."""
    Xf, yc, means, scales, intercept = _prepare(X, y, standardize)
    w, *_ = np.linalg.lstsq(Xf, yc, rcond=None)
    w = _zero_constant_columns(w, Xf, standardize)
    return LinearModel(w, intercept, means, scales, alpha=0.0, l1_ratio=0.0)


def fit_ridge(X, y, alpha: float, standardize: bool = True) -> LinearModel:
    """Exact solve of (X'X + alpha I) w = X'y in the fitting space."""
    if alpha < 0:
        raise ValueError(f"alpha must be >= 0, got {alpha}")
    Xf, yc, means, scales, intercept = _prepare(X, y, standardize)
    p = Xf.shape[1]
    gram = Xf.T @ Xf + alpha * np.eye(p)
    rhs = Xf.T @ yc
    try:
        w = np.linalg.solve(gram, rhs)
    except np.linalg.LinAlgError:
        # singular normal equations (alpha 0 with collinear columns)
        w, *_ = np.linalg.lstsq(Xf, yc, rcond=None)
    w = _zero_constant_columns(w, Xf, standardize)
    return LinearModel(w, intercept, means, scales, alpha=float(alpha), l1_ratio=0.0)


def enet_objective(X, y, w, alpha: float, l1_ratio: float) -> float:
    """Elastic-net objective in the space X and y live in."""
    n = X.shape[0]
    resid = y - X @ w
    return float(
        (resid @ resid) / (2.0 * n)
        + alpha * l1_ratio * np.abs(w).sum()
        + 0.5 * alpha * (1.0 - l1_ratio) * (w @ w)
    )


def _check_enet_params(alpha, l1_ratio, tol, max_iter):
    if alpha < 0:
        raise ValueError(f"alpha must be >= 0, got {alpha}")
    if not 0.0 <= l1_ratio <= 1.0:
        raise ValueError(f"l1_ratio must lie in [0, 1], got {l1_ratio}")
    if tol <= 0:
        raise ValueError(f"tol must be > 0, got {tol}")
    if max_iter < 1:
        raise ValueError(f"max_iter must be >= 1, got {max_iter}")


def fit_elastic_net(X, y, alpha: float, l1_ratio: float, tol: float = 1e-6,
                    max_iter: int = 10_000, standardize: bool = True,
                    w_init=None) -> LinearModel:
    """Cyclic coordinate descent on the elastic-net objective.

    Converged when the largest absolute coefficient update in a full sweep
    is <= tol; running past max_iter is not an error but clears the model's
    ``converged`` flag.
    """
    _check_enet_params(alpha, l1_ratio, tol, max_iter)
    Xf, yc, means, scales, intercept = _prepare(X, y, standardize)
    n, p = Xf.shape
    col_sq = np.einsum("ij,ij->j", Xf, Xf)
    if w_init is None:
        w = np.zeros(p)
    else:
        w = np.ascontiguousarray(w_init, dtype=np.float64).copy()
        if w.shape != (p,):
            raise ValueError(f"w_init must have shape ({p},)")
    r = yc - Xf @ w
    l1 = n * alpha * l1_ratio
    l2 = n * alpha * (1.0 - l1_ratio)
    n_iter, _, converged = backend.enet_coordinate_descent(
        w, Xf, r, col_sq, l1, l2, max_iter, tol
    )
    return LinearModel(w, intercept, means, scales, alpha=float(alpha),
                       l1_ratio=float(l1_ratio), converged=converged, n_iter=n_iter)


def fit_lasso(X, y, alpha: float, tol: float = 1e-6, max_iter: int = 10_000,
              standardize: bool = True, w_init=None) -> LinearModel:
    """Elastic net with the mixing ratio pinned to pure L1."""
    return fit_elastic_net(X, y, alpha, 1.0, tol=tol, max_iter=max_iter,
                           standardize=standardize, w_init=w_init)


def alpha_grid(X, y, l1_ratio: float, count: int = 100, eps: float = 1e-3) -> np.ndarray:
    """Log-spaced descending penalty grid from alpha_max down to eps * alpha_max.

    alpha_max = max_j |X_j' y| / (n * l1_ratio) on the standardized design,
    the smallest penalty at which every coefficient is zero.
    """
    if l1_ratio <= 0:
        raise ValueError("alpha_max is undefined for l1_ratio = 0; use an explicit grid")
    if count < 2:
        raise ValueError(f"count must be >= 2, got {count}")
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    X_std, _, _ = standardize_columns(X)
    y = np.asarray(y, dtype=np.float64)
    yc = y - y.mean()
    n = X_std.shape[0]
    alpha_max = float(np.max(np.abs(X_std.T @ yc)) / (n * l1_ratio))
    if alpha_max <= 0.0:
        # degenerate target (constant y): any penalty gives the zero model
        alpha_max = np.finfo(np.float64).resolution
    # the descent kernels sum in a different order than the BLAS reduction
    # above; the tiny inflation keeps the top-of-grid fit exactly sparse
    alpha_max *= 1.0 + 1e-10
    return np.logspace(np.log10(alpha_max), np.log10(alpha_max * eps), num=count)


def enet_path(X, y, alphas, l1_ratio: float, tol: float = 1e-6,
              max_iter: int = 10_000) -> RegPath:
    """Warm-started coordinate-descent fits along a descending alpha grid."""
    alphas = np.asarray(alphas, dtype=np.float64)
    if alphas.ndim != 1 or alphas.shape[0] == 0:
        raise ValueError("alphas must be a nonempty 1-D grid")
    _check_enet_params(float(alphas[0]), l1_ratio, tol, max_iter)
    Xf, yc, means, scales, intercept = _prepare(X, y, standardize=True)
    n, p = Xf.shape
    col_sq = np.einsum("ij,ij->j", Xf, Xf)
    w = np.zeros(p)
    models = []
    objectives = np.empty(alphas.shape[0])
    for k, alpha in enumerate(alphas):
        if alpha < 0:
            raise ValueError(f"alpha must be >= 0, got {alpha}")
        r = yc - Xf @ w
        n_iter, _, converged = backend.enet_coordinate_descent(
            w, Xf, r, col_sq, n * alpha * l1_ratio, n * alpha * (1.0 - l1_ratio),
            max_iter, tol,
        )
        models.append(LinearModel(w.copy(), intercept, means, scales,
                                  alpha=float(alpha), l1_ratio=float(l1_ratio),
                                  converged=converged, n_iter=n_iter))
        objectives[k] = enet_objective(Xf, yc, w, float(alpha), l1_ratio)
    return RegPath(alphas.copy(), tuple(models), objectives)
