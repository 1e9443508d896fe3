"""Least-angle regression paths and information-criterion selection.

The path is piecewise linear in the penalty: each knot records the maximum
absolute correlation divided by n, which in LASSO mode coincides with the
coordinate-descent penalty alpha, so path models can be cross-checked
against the descent solver at matched alphas. LASSO mode drops variables
whose coefficients cross zero; plain LARS mode keeps them and ends at the
least-squares solution.
"""

from __future__ import annotations

import numpy as np

from .model import CriterionScore, LinearModel, RegPath, standardize_columns
from .solvers import enet_objective

_TINY = 1e-12


def lars_path(X, y, mode: str = "lars", max_steps: int | None = None) -> RegPath:
    """Trace the LARS (or LASSO-via-LARS) coefficient path.

    Features are standardized internally, so the equiangular geometry the
    algorithm relies on holds regardless of input scaling.
    """
    if mode not in ("lars", "lasso"):
        raise ValueError(f"mode must be 'lars' or 'lasso', got {mode!r}")
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
        raise ValueError("X must be 2-D and y 1-D with matching rows")
    n, p = X.shape
    if n < 2:
        raise ValueError(f"need at least 2 samples, got {n}")

    X_std, means, scales = standardize_columns(X)
    intercept = float(y.mean())
    resid = y - intercept

    coef = np.zeros(p)
    active: list[int] = []
    inactive = np.ones(p, dtype=bool)
    # standardized constant columns are identically zero and can never enter
    inactive &= np.einsum("ij,ij->j", X_std, X_std) > _TINY

    c0 = X_std.T @ resid
    knot_alphas = [float(np.max(np.abs(c0))) / n]
    knot_coefs = [coef.copy()]

    if max_steps is None:
        max_steps = 8 * p + 16
    drop = False

    for _ in range(max_steps):
        c = X_std.T @ resid
        C = float(np.max(np.abs(c[active]))) if active else 0.0
        if not drop:
            masked = np.where(inactive, np.abs(c), -np.inf)
            j_new = int(np.argmax(masked))
            if masked[j_new] <= _TINY:
                break
            C = float(masked[j_new])
            active.append(j_new)
            inactive[j_new] = False
        if C <= _TINY:
            break

        idx = np.array(active)
        signs = np.sign(c[idx])
        signs[signs == 0.0] = 1.0
        gram = X_std[:, idx].T @ X_std[:, idx]
        try:
            u = np.linalg.solve(gram, signs)
        except np.linalg.LinAlgError:
            break
        denom = float(signs @ u)
        if denom <= _TINY or not np.isfinite(denom):
            break
        A = 1.0 / np.sqrt(denom)
        w_dir = A * u
        eq = X_std[:, idx] @ w_dir
        rates = X_std.T @ eq

        gamma = C / A
        if inactive.any():
            cj, aj = c[inactive], rates[inactive]
            for num, den in ((C - cj, A - aj), (C + cj, A + aj)):
                ok = den > _TINY
                if ok.any():
                    cand = num[ok] / den[ok]
                    cand = cand[cand > _TINY]
                    if cand.size:
                        gamma = min(gamma, float(np.min(cand)))

        drop = False
        drop_local: np.ndarray | None = None
        if mode == "lasso":
            with np.errstate(divide="ignore", invalid="ignore"):
                crossings = -coef[idx] / w_dir
            crossings[~np.isfinite(crossings)] = np.inf
            positive = crossings > _TINY
            if positive.any():
                z_min = float(np.min(crossings[positive]))
                if z_min < gamma:
                    gamma = z_min
                    drop_local = np.flatnonzero(positive & (crossings <= z_min))
                    drop = True

        coef[idx] += gamma * w_dir
        resid = resid - gamma * eq
        new_alpha = max((C - gamma * A) / n, 0.0)

        if drop_local is not None:
            dropped = idx[drop_local]
            coef[dropped] = 0.0
            inactive[dropped] = True
            for d in dropped.tolist():
                active.remove(d)

        if new_alpha < knot_alphas[-1] - _TINY:
            knot_alphas.append(new_alpha)
            knot_coefs.append(coef.copy())
        else:
            knot_coefs[-1] = coef.copy()

        if new_alpha <= _TINY:
            break

    l1_ratio = 1.0
    models = tuple(
        LinearModel(w, intercept, means, scales, alpha=a, l1_ratio=l1_ratio)
        for a, w in zip(knot_alphas, knot_coefs)
    )
    yc = y - intercept
    if mode == "lasso":
        objectives = np.array([
            enet_objective(X_std, yc, mdl.coefficients, a, 1.0)
            for a, mdl in zip(knot_alphas, models)
        ])
    else:
        rss = np.array([
            float(np.sum((yc - X_std @ mdl.coefficients) ** 2)) for mdl in models
        ])
        objectives = rss / (2.0 * n)
    return RegPath(np.asarray(knot_alphas), models, objectives)


def ic_select(path: RegPath, X, y, kind: str = "AIC") -> tuple:
    """Pick the path model minimizing n*ln(RSS/n) + penalty*df.

    penalty is 2 for AIC and ln(n) for BIC; df counts nonzero coefficients.
    Ties go to the larger alpha (the path is descending, so the first
    minimizer seen wins). A zero-RSS model scores -inf and wins outright.
    """
    if kind not in ("AIC", "BIC"):
        raise ValueError(f"kind must be 'AIC' or 'BIC', got {kind!r}")
    if len(path) == 0:
        raise ValueError("empty path")
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = y.shape[0]
    penalty = 2.0 if kind == "AIC" else float(np.log(n))

    best_model = None
    best_score = None
    for model in path.models:
        rss = float(np.sum((y - model.predict(X)) ** 2))
        df = model.nonzero_count()
        if rss == 0.0:
            value = -np.inf
        else:
            value = n * np.log(rss / n) + penalty * df
        score = CriterionScore(kind, float(value), df)
        if best_score is None or score.value < best_score.value:
            best_model, best_score = model, score
    return best_model, best_score
