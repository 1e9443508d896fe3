"""Metrics, cross-validation splits, hyperparameter selection and the
repeated 75/25 held-out harness.

Per-repeat seeds derive from a splittable hash of (master_seed, repeat
index), so serial and parallel executions of the harness produce identical
reports. Hyperparameter selection scores candidates by mean out-of-fold
MSE; ties prefer the more regularized model (larger alpha, then larger
l1_ratio for the elastic net; smaller C, then smaller gamma for SVR).
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np
from joblib import Parallel, delayed
from threadpoolctl import threadpool_limits

from . import svr as svr_module
from .dataset import EncodedTask
from .errors import (
    AggregateError,
    InsufficientDataError,
    SelectionError,
    UndefinedCorrelationError,
)
from .forest import fit_random_forest
from .linear import (
    alpha_grid,
    enet_path,
    fit_elastic_net,
    fit_lasso,
    fit_ridge,
    ic_select,
    lars_path,
)
from .linear.model import LinearModel

ESTIMATOR_NAMES = (
    "EN", "LASSO", "RR", "LARS", "LASSO-LARS",
    "LASSO-LARS-AIC", "LASSO-LARS-BIC", "RF", "SVR",
)

#: Candidate mixing ratios when the elastic net tunes its L1 ratio.
L1_RATIO_GRID = (0.1, 0.3, 0.5, 0.7, 0.9, 0.95, 0.99, 1.0)

#: Fixed ridge penalty set (powers of ten).
RIDGE_ALPHAS = (1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0)

SVR_C_GRID = (1.0, 10.0, 100.0, 1000.0, 10000.0)
SVR_GAMMA_GRID = (1.0, 0.1, 0.01, 0.001, 0.0001)

N_ALPHAS = 100
ALPHA_EPS = 1e-3


# ---------------------------------------------------------------------------
# Metrics


def _check_pair(y, yhat):
    y = np.asarray(y, dtype=np.float64)
    yhat = np.asarray(yhat, dtype=np.float64)
    if y.ndim != 1 or yhat.ndim != 1 or y.shape != yhat.shape or y.shape[0] == 0:
        raise ValueError("y and yhat must be equal-length nonempty vectors")
    return y, yhat


def mae(y, yhat) -> float:
    """Mean absolute error."""
    y, yhat = _check_pair(y, yhat)
    return float(np.mean(np.abs(y - yhat)))


def mse(y, yhat) -> float:
    """Mean squared error."""
    y, yhat = _check_pair(y, yhat)
    return float(np.mean((y - yhat) ** 2))


def pcc(y, yhat) -> float:
    """Sample Pearson correlation; undefined for constant input."""
    y, yhat = _check_pair(y, yhat)
    if y.shape[0] < 2:
        raise ValueError("correlation needs at least 2 points")
    yd = y - y.mean()
    pd = yhat - yhat.mean()
    denom = math.sqrt(float(yd @ yd)) * math.sqrt(float(pd @ pd))
    if denom == 0.0:
        raise UndefinedCorrelationError("correlation undefined for a constant vector")
    return float(np.clip(float(yd @ pd) / denom, -1.0, 1.0))


# ---------------------------------------------------------------------------
# Splits


@dataclass(frozen=True)
class SplitPlan:
    """One 75/25 partition of instance indices."""

    seed: int
    train_indices: np.ndarray
    test_indices: np.ndarray

    def __post_init__(self):
        self.train_indices.setflags(write=False)
        self.test_indices.setflags(write=False)


def random_split(n: int, train_fraction: float = 0.75, seed: int = 0) -> SplitPlan:
    """Uniform split with |train| = ceiling(train_fraction * n)."""
    if n < 4:
        raise ValueError(f"need at least 4 instances to split, got {n}")
    if not 0.0 < train_fraction < 1.0:
        raise ValueError(f"train_fraction must lie in (0, 1), got {train_fraction}")
    n_train = math.ceil(train_fraction * n)
    perm = np.random.Generator(np.random.PCG64(seed)).permutation(n)
    return SplitPlan(
        seed=seed,
        train_indices=np.sort(perm[:n_train]),
        test_indices=np.sort(perm[n_train:]),
    )


def kfold_split(n: int, k: int, seed: int = 0) -> list:
    """Shuffled k-fold partition; fold sizes differ by at most one."""
    if not 2 <= k <= n:
        raise ValueError(f"k must lie in 2..n={n}, got {k}")
    perm = np.random.Generator(np.random.PCG64(seed)).permutation(n)
    sizes = np.full(k, n // k)
    sizes[: n % k] += 1
    folds = []
    start = 0
    for size in sizes:
        test = np.sort(perm[start:start + size])
        train = np.sort(np.concatenate([perm[:start], perm[start + size:]]))
        folds.append((train, test))
        start += size
    return folds


# ---------------------------------------------------------------------------
# Hyperparameter selection


def _path_fold_mse(X, y, folds, alphas, l1_ratio, method):
    """Mean out-of-fold MSE at each alpha of a shared grid."""
    k = len(folds)
    fold_mse = np.empty((k, alphas.shape[0]))
    for fi, (tr, te) in enumerate(folds):
        if method in ("EN", "LASSO"):
            path = enet_path(X[tr], y[tr], alphas, l1_ratio)
            coefs = np.stack([m.coefficients for m in path.models])
        else:
            path = lars_path(X[tr], y[tr], mode="lasso" if method == "LASSO-LARS" else "lars")
            coefs = np.stack([path.coef_at(a) for a in alphas])
        ref = path.models[0]
        Z = (X[te] - ref.feature_means) / ref.feature_scales
        preds = Z @ coefs.T + ref.intercept
        fold_mse[fi] = np.mean((preds - y[te][:, None]) ** 2, axis=0)
    return fold_mse.mean(axis=0)


def cv_select_linear(X, y, estimator: str, l1_grid=None, k: int = 5,
                     seed: int = 0, n_alphas: int = N_ALPHAS,
                     eps: float = ALPHA_EPS, return_cv: bool = False):
    """Pick alpha (and l1_ratio for EN) minimizing mean out-of-fold MSE.

    Candidates come from a log-spaced path per mixing ratio; ties prefer the
    larger alpha, then the larger ratio.
    """
    if estimator not in ("EN", "LASSO", "LARS-LASSO", "LASSO-LARS", "LARS"):
        raise ValueError(f"unsupported estimator {estimator!r}")
    method = {"LARS-LASSO": "LASSO-LARS"}.get(estimator, estimator)
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if estimator == "EN":
        ratios = tuple(l1_grid) if l1_grid is not None else (0.5,)
    else:
        ratios = (1.0,)
    folds = kfold_split(X.shape[0], k, seed)
    table = []  # (mse, alpha, ratio)
    for ratio in ratios:
        alphas = alpha_grid(X, y, ratio, count=n_alphas, eps=eps)
        scores = _path_fold_mse(X, y, folds, alphas, ratio, method)
        table.extend(
            (float(s), float(a), float(ratio))
            for s, a in zip(scores, alphas)
        )
    finite = [row for row in table if math.isfinite(row[0])]
    if not finite:
        raise SelectionError("every hyperparameter candidate produced a degenerate fit")
    best = min(finite, key=lambda row: (row[0], -row[1], -row[2]))
    chosen = {"alpha": best[1]}
    if estimator == "EN":
        chosen["l1_ratio"] = best[2]
    return (chosen, table) if return_cv else chosen


def cv_select_ridge(X, y, alphas=RIDGE_ALPHAS, k: int = 5, seed: int = 0,
                    return_cv: bool = False):
    """Pick the ridge penalty from a fixed grid by k-fold MSE (ties: larger alpha)."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if len(alphas) == 0:
        raise ValueError("empty alpha grid")
    folds = kfold_split(X.shape[0], k, seed)
    table = []
    for alpha in alphas:
        fold_scores = []
        for tr, te in folds:
            model = fit_ridge(X[tr], y[tr], alpha)
            fold_scores.append(mse(y[te], model.predict(X[te])))
        table.append((float(np.mean(fold_scores)), float(alpha)))
    finite = [row for row in table if math.isfinite(row[0])]
    if not finite:
        raise SelectionError("every ridge candidate produced a degenerate fit")
    best = min(finite, key=lambda row: (row[0], -row[1]))
    return (best[1], table) if return_cv else best[1]


def grid_search_svr(X, y, C_grid=SVR_C_GRID, gamma_grid=SVR_GAMMA_GRID,
                    k: int = 5, seed: int = 0, epsilon: float = 0.01,
                    return_cv: bool = False):
    """Exhaustive (C, gamma) grid search by k-fold MSE (ties: smaller C, then gamma)."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if len(C_grid) == 0 or len(gamma_grid) == 0:
        raise ValueError("empty SVR grid")
    folds = kfold_split(X.shape[0], k, seed)
    table = []
    for C in C_grid:
        for gamma in gamma_grid:
            fold_scores = []
            for tr, te in folds:
                model = svr_module.fit_svr(X[tr], y[tr], C=C, gamma=gamma, epsilon=epsilon)
                fold_scores.append(mse(y[te], model.predict(X[te])))
            table.append((float(np.mean(fold_scores)), float(C), float(gamma)))
    finite = [row for row in table if math.isfinite(row[0])]
    if not finite:
        raise SelectionError("every SVR candidate produced a degenerate fit")
    best = min(finite, key=lambda row: (row[0], row[1], row[2]))
    return ((best[1], best[2]), table) if return_cv else (best[1], best[2])


# ---------------------------------------------------------------------------
# Estimator dispatch


@dataclass(frozen=True)
class EstimatorSpec:
    """Which estimator the harness runs and how it tunes itself."""

    name: str
    l1_grid: tuple | None = None  # EN only; None pins the ratio to 0.5
    svr_epsilon: float = 0.01

    def __post_init__(self):
        if self.name not in ESTIMATOR_NAMES:
            raise ValueError(
                f"unknown estimator {self.name!r}; valid names: {', '.join(ESTIMATOR_NAMES)}"
            )


def _model_at_alpha(path, alpha: float) -> LinearModel:
    ref = path.models[0]
    return LinearModel(path.coef_at(alpha), ref.intercept, ref.feature_means,
                       ref.feature_scales, alpha=float(alpha), l1_ratio=ref.l1_ratio)


def select_and_fit(X, y, spec: EstimatorSpec, seed: int = 0):
    """Tune the estimator on (X, y), refit with the chosen parameters.

    Returns (model, chosen_params).
    """
    name = spec.name
    if name == "EN":
        chosen = cv_select_linear(X, y, "EN", l1_grid=spec.l1_grid, seed=seed)
        model = fit_elastic_net(X, y, chosen["alpha"], chosen["l1_ratio"])
        return model, chosen
    if name == "LASSO":
        chosen = cv_select_linear(X, y, "LASSO", seed=seed)
        return fit_lasso(X, y, chosen["alpha"]), chosen
    if name == "RR":
        alpha = cv_select_ridge(X, y, seed=seed)
        return fit_ridge(X, y, alpha), {"alpha": alpha}
    if name in ("LARS", "LASSO-LARS"):
        chosen = cv_select_linear(X, y, name, seed=seed)
        path = lars_path(X, y, mode="lasso" if name == "LASSO-LARS" else "lars")
        return _model_at_alpha(path, chosen["alpha"]), chosen
    if name in ("LASSO-LARS-AIC", "LASSO-LARS-BIC"):
        path = lars_path(X, y, mode="lasso")
        model, score = ic_select(path, X, y, kind=name.rsplit("-", 1)[1])
        return model, {"alpha": model.alpha}
    if name == "RF":
        params = {"n_trees": 10, "max_features": X.shape[1],
                  "min_samples_split": 2, "min_samples_leaf": 1, "bootstrap": True}
        model = fit_random_forest(X, y, seed=seed, **params)
        return model, dict(params)
    if name == "SVR":
        C, gamma = grid_search_svr(X, y, seed=seed, epsilon=spec.svr_epsilon)
        model = svr_module.fit_svr(X, y, C=C, gamma=gamma, epsilon=spec.svr_epsilon)
        return model, {"C": C, "gamma": gamma, "epsilon": spec.svr_epsilon}
    raise ValueError(f"unknown estimator {name!r}")


# ---------------------------------------------------------------------------
# Repeated holdout


@dataclass(frozen=True)
class FitReport:
    """One repeat's held-out scores and chosen hyperparameters."""

    estimator: str
    task: int
    mae: float
    mse: float
    pcc: float | None
    chosen_params: dict
    split_seed: int

    def to_dict(self) -> dict:
        return {
            "estimator": self.estimator,
            "task": self.task,
            "mae": self.mae,
            "mse": self.mse,
            "pcc": self.pcc,
            "chosen_params": dict(self.chosen_params),
            "split_seed": self.split_seed,
        }


@dataclass(frozen=True)
class AggregateReport:
    """Summary of all repeats for one (estimator, task) cell."""

    estimator: str
    task: int
    n_repeats: int
    mae_mean: float
    mae_sd: float
    mse_mean: float
    mse_sd: float
    alpha_mean: float | None
    alpha_sd: float | None
    l1ratio_median: float | None
    l1ratio_iqr: float | None
    hotest_hit_counts: tuple
    heldout_pred_mean: tuple
    instance_truths: tuple
    fit_reports: tuple
    failures: tuple
    master_seed: int

    def to_dict(self) -> dict:
        return {
            "estimator": self.estimator,
            "task": self.task,
            "n_repeats": self.n_repeats,
            "mae_mean": self.mae_mean,
            "mae_sd": self.mae_sd,
            "mse_mean": self.mse_mean,
            "mse_sd": self.mse_sd,
            "alpha_mean": self.alpha_mean,
            "alpha_sd": self.alpha_sd,
            "l1ratio_median": self.l1ratio_median,
            "l1ratio_iqr": self.l1ratio_iqr,
            "hotest_hit_counts": list(self.hotest_hit_counts),
            "heldout_pred_mean": list(self.heldout_pred_mean),
            "instance_truths": list(self.instance_truths),
            "fit_reports": [r.to_dict() for r in self.fit_reports],
            "failures": [{"repeat": r, "error": msg} for r, msg in self.failures],
            "master_seed": self.master_seed,
        }


def derive_seeds(master_seed: int, repeat: int) -> tuple:
    """(split_seed, cv_seed) from a splittable hash of (master_seed, repeat)."""
    state = np.random.SeedSequence(master_seed, spawn_key=(repeat,)).generate_state(2)
    return int(state[0]), int(state[1])


def resolve_n_jobs(requested: int | None = None) -> int:
    """Worker count under the LEMPS_THREADS cap (0 or unset means auto)."""
    cap_raw = os.environ.get("LEMPS_THREADS", "0")
    try:
        cap = int(cap_raw)
    except ValueError:
        raise ValueError(f"LEMPS_THREADS must be an integer, got {cap_raw!r}") from None
    if cap < 0:
        raise ValueError(f"LEMPS_THREADS must be >= 0, got {cap}")
    n_cpu = os.cpu_count() or 1
    n_jobs = n_cpu if requested is None or requested <= 0 else requested
    if cap > 0:
        n_jobs = min(n_jobs, cap)
    return max(1, min(n_jobs, n_cpu))


def _run_repeat(X, y, spec, task_depth, master_seed, repeat):
    split_seed, cv_seed = derive_seeds(master_seed, repeat)
    plan = random_split(X.shape[0], 0.75, seed=split_seed)
    with threadpool_limits(limits=1):
        model, chosen = select_and_fit(X[plan.train_indices], y[plan.train_indices],
                                       spec, seed=cv_seed)
        preds = model.predict(X[plan.test_indices])
    truth = y[plan.test_indices]
    try:
        pcc_val = pcc(truth, preds)
    except UndefinedCorrelationError:
        pcc_val = None
    mae_val = mae(truth, preds)
    mse_val = mse(truth, preds)
    if not (math.isfinite(mae_val) and math.isfinite(mse_val)):
        raise ValueError("non-finite held-out error")
    report = FitReport(
        estimator=spec.name,
        task=task_depth,
        mae=mae_val,
        mse=mse_val,
        pcc=pcc_val,
        chosen_params=chosen,
        split_seed=split_seed,
    )
    return report, plan.test_indices, preds


def _safe_repeat(X, y, spec, task_depth, master_seed, repeat):
    try:
        return "ok", repeat, _run_repeat(X, y, spec, task_depth, master_seed, repeat)
    except Exception as exc:  # single-repeat failures are recorded, not fatal
        return "err", repeat, f"{type(exc).__name__}: {exc}"


def repeat_holdout(task: EncodedTask, spec: EstimatorSpec, n_repeats: int = 1000,
                   master_seed: int = 0, n_jobs: int | None = None) -> AggregateReport:
    """Run the 75/25 split-and-score loop and aggregate the per-repeat reports."""
    if n_repeats < 1:
        raise ValueError(f"n_repeats must be >= 1, got {n_repeats}")
    M = task.n_rows
    if M < 8:
        raise InsufficientDataError(f"need at least 8 instances, got {M}")
    X, y = task.X, task.y

    n_jobs = resolve_n_jobs(n_jobs)
    if n_jobs > 1 and n_repeats > 1:
        outcomes = Parallel(n_jobs=n_jobs)(
            delayed(_safe_repeat)(X, y, spec, task.lag_depth, master_seed, r)
            for r in range(n_repeats)
        )
    else:
        outcomes = [_safe_repeat(X, y, spec, task.lag_depth, master_seed, r)
                    for r in range(n_repeats)]

    reports = []
    failures = []
    hits = np.zeros(M, dtype=np.int64)
    pred_sums = np.zeros(M)
    for status, repeat, payload in outcomes:
        if status == "err":
            failures.append((repeat, payload))
            continue
        report, test_idx, preds = payload
        reports.append(report)
        hits[test_idx] += 1
        pred_sums[test_idx] += preds
    if len(failures) > 0.05 * n_repeats:
        raise AggregateError(
            f"{len(failures)} of {n_repeats} repeats failed; first: {failures[0][1]}"
        )
    if not reports:
        raise AggregateError("no successful repeats to aggregate")

    maes = np.array([r.mae for r in reports])
    mses = np.array([r.mse for r in reports])
    alphas = [r.chosen_params["alpha"] for r in reports if "alpha" in r.chosen_params]
    ratios = [r.chosen_params["l1_ratio"] for r in reports if "l1_ratio" in r.chosen_params]

    alpha_mean = float(np.mean(alphas)) if len(alphas) == len(reports) else None
    alpha_sd = float(np.std(alphas)) if len(alphas) == len(reports) else None
    if len(ratios) == len(reports):
        l1_median = float(np.median(ratios))
        l1_iqr = float(np.percentile(ratios, 75) - np.percentile(ratios, 25))
    else:
        l1_median = None
        l1_iqr = None

    pred_mean = tuple(
        float(pred_sums[i] / hits[i]) if hits[i] else None for i in range(M)
    )
    return AggregateReport(
        estimator=spec.name,
        task=task.lag_depth,
        n_repeats=len(reports),
        mae_mean=float(maes.mean()),
        mae_sd=float(maes.std()),
        mse_mean=float(mses.mean()),
        mse_sd=float(mses.std()),
        alpha_mean=alpha_mean,
        alpha_sd=alpha_sd,
        l1ratio_median=l1_median,
        l1ratio_iqr=l1_iqr,
        hotest_hit_counts=tuple(int(h) for h in hits),
        heldout_pred_mean=pred_mean,
        instance_truths=tuple(float(v) for v in y),
        fit_reports=tuple(reports),
        failures=tuple(failures),
        master_seed=master_seed,
    )
