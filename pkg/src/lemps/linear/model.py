"""Linear model container, regularization paths and information criteria.

All linear fits operate on z-scored features with a centered target, so a
model carries the training-fold means and scales alongside its coefficients.
Predictions are therefore invariant to rescaling any input column, while the
coefficients themselves are reported in standardized space.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


def standardize_columns(X: np.ndarray) -> tuple:
    """Column means and population standard deviations; constant columns get
    scale 1 and standardize to exact zeros.

    Returns (X_std, means, scales) with X_std Fortran-ordered for fast
    column access in the coordinate-descent kernel.
    """
    X = np.asarray(X, dtype=np.float64)
    means = X.mean(axis=0)
    scales = X.std(axis=0)
    constant = np.all(X == X[:1], axis=0)
    scales = np.where(~constant & (scales > 0.0), scales, 1.0)
    X_std = np.asfortranarray((X - means) / scales)
    X_std[:, constant] = 0.0
    return X_std, means, scales


@dataclass(frozen=True)
class LinearModel:
    """Coefficients in standardized feature space plus the scaling that defines it.

    Prediction contract: yhat(x) = intercept + sum_j w_j * (x_j - mean_j) / scale_j.
    """

    coefficients: np.ndarray
    intercept: float
    feature_means: np.ndarray
    feature_scales: np.ndarray
    alpha: float = 0.0
    l1_ratio: float = 0.0
    converged: bool = True
    n_iter: int = 0

    def __post_init__(self):
        w, mu, sc = self.coefficients, self.feature_means, self.feature_scales
        if not (w.shape == mu.shape == sc.shape):
            raise ValueError("coefficients, means and scales must share one shape")
        if np.any(sc <= 0.0):
            raise ValueError("feature scales must be positive")
        for arr in (w, mu, sc):
            arr.setflags(write=False)

    @property
    def n_features(self) -> int:
        return self.coefficients.shape[0]

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X.reshape(1, -1)
        if X.shape[1] != self.n_features:
            raise ValueError(
                f"model was trained on {self.n_features} features, got {X.shape[1]}"
            )
        Z = (X - self.feature_means) / self.feature_scales
        return self.intercept + Z @ self.coefficients

    def nonzero_count(self) -> int:
        return int(np.count_nonzero(self.coefficients))


@dataclass(frozen=True)
class RegPath:
    """Models fitted along a strictly decreasing grid of penalty strengths."""

    alphas: np.ndarray
    models: tuple
    objective_values: np.ndarray

    def __post_init__(self):
        if len(self.models) != self.alphas.shape[0]:
            raise ValueError("one model per alpha required")
        if self.alphas.shape[0] == 0:
            raise ValueError("empty path")
        if np.any(np.diff(self.alphas) >= 0.0):
            raise ValueError("alphas must be strictly decreasing")
        self.alphas.setflags(write=False)
        self.objective_values.setflags(write=False)

    def __len__(self) -> int:
        return self.alphas.shape[0]

    def coef_at(self, alpha: float) -> np.ndarray:
        """Coefficients at an arbitrary alpha by linear interpolation in alpha.

        Exact for LARS-built LASSO paths, whose coefficients are piecewise
        linear between knots. Above the top knot the path is clamped to the
        first model, below the bottom knot to the last.
        """
        alphas = self.alphas
        if alpha >= alphas[0]:
            return self.models[0].coefficients.copy()
        if alpha <= alphas[-1]:
            return self.models[-1].coefficients.copy()
        hi = int(np.searchsorted(-alphas, -alpha, side="right")) - 1
        lo = hi + 1
        a_hi, a_lo = alphas[hi], alphas[lo]
        t = (a_hi - alpha) / (a_hi - a_lo)
        return (1.0 - t) * self.models[hi].coefficients + t * self.models[lo].coefficients


@dataclass(frozen=True)
class CriterionScore:
    """An information-criterion value with its model complexity."""

    kind: str
    value: float
    df: int

    def __post_init__(self):
        if self.kind not in ("AIC", "BIC"):
            raise ValueError(f"kind must be AIC or BIC, got {self.kind!r}")
        if self.df < 0:
            raise ValueError("df must be nonnegative")
