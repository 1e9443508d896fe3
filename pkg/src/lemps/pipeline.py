"""Final prediction system: train per-task elastic nets on the full training
period, predict each validation month, and judge predictions against an
asymmetric tolerance band with per-calendar-month novelty detection.

A validation instance's lag window may reach back into training months, so
the month right before the validation boundary produces the first
prediction. The month after the validation period is also emitted (its
instance exists) but carries no truth and is excluded from every metric.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .dataset import Dataset, MonthKey, concat, encode_task
from .errors import ContinuityError, InsufficientDataError
from .evaluation import mae as eval_mae
from .evaluation import mse as eval_mse
from .evaluation import pcc as eval_pcc
from .errors import UndefinedCorrelationError
from .linear import fit_elastic_net
from .linear.model import LinearModel

TASK_DEPTHS = (1, 2, 3, 4, 5, 6)
RAINY_MONTHS = frozenset(range(4, 12))  # April through November

TOLERANCE_UPPER = 0.1
TOLERANCE_LOWER = -0.05

#: Minimum residual history per calendar month before novelty scoring.
MIN_NOVELTY_HISTORY = 3


def season_of(month: int) -> str:
    return "rainy" if month in RAINY_MONTHS else "dry"


@dataclass(frozen=True)
class TaskParams:
    alpha: float
    l1_ratio: float

    def __post_init__(self):
        if self.alpha < 0:
            raise ValueError(f"alpha must be >= 0, got {self.alpha}")
        if not 0.0 <= self.l1_ratio <= 1.0:
            raise ValueError(f"l1_ratio must lie in [0, 1], got {self.l1_ratio}")


@dataclass(frozen=True)
class LempsConfig:
    """Per-task elastic-net parameters plus evaluation settings."""

    task_params: dict
    boundary: MonthKey
    tolerance_upper: float = TOLERANCE_UPPER
    tolerance_lower: float = TOLERANCE_LOWER
    novelty_window_sds: float = 3.0

    def __post_init__(self):
        missing = [m for m in TASK_DEPTHS if m not in self.task_params]
        if missing:
            raise ValueError(f"config missing task(s): {missing}")
        if not self.tolerance_upper > 0.0 > self.tolerance_lower:
            raise ValueError(
                f"tolerances must satisfy upper > 0 > lower, got "
                f"{self.tolerance_upper}/{self.tolerance_lower}"
            )
        if self.novelty_window_sds <= 0:
            raise ValueError(
                f"novelty_window_sds must be > 0, got {self.novelty_window_sds}"
            )

    def to_dict(self) -> dict:
        return {
            "tasks": {
                str(m): {"alpha": p.alpha, "l1_ratio": p.l1_ratio}
                for m, p in self.task_params.items()
            },
            "boundary": str(self.boundary),
            "tolerance_upper": self.tolerance_upper,
            "tolerance_lower": self.tolerance_lower,
            "novelty_window_sds": self.novelty_window_sds,
        }


def config_from_tuning(report_dicts, boundary: MonthKey,
                       tolerance_upper: float = TOLERANCE_UPPER,
                       tolerance_lower: float = TOLERANCE_LOWER,
                       novelty_window_sds: float = 3.0) -> LempsConfig:
    """Transfer tuned aggregates into a config: mean alpha, median L1 ratio."""
    params = {}
    for rep in report_dicts:
        m = int(rep["task"])
        alpha = rep.get("alpha_mean")
        ratio = rep.get("l1ratio_median")
        if alpha is None or ratio is None:
            raise ValueError(f"tuning report for task {m} lacks alpha/l1-ratio aggregates")
        params[m] = TaskParams(alpha=float(alpha), l1_ratio=float(ratio))
    return LempsConfig(task_params=params, boundary=boundary,
                       tolerance_upper=tolerance_upper,
                       tolerance_lower=tolerance_lower,
                       novelty_window_sds=novelty_window_sds)


def train_final(train: Dataset, config: LempsConfig, m: int) -> LinearModel:
    """Elastic net on the full encoded training task, no splitting.

    The final model is fit once, so it converges tighter than the harness
    default; correlated lag features otherwise leave a visible gap to the
    exact unpenalized solution.
    """
    if m not in config.task_params:
        raise ValueError(f"config has no parameters for task {m}")
    params = config.task_params[m]
    task = encode_task(train, m)
    return fit_elastic_net(task.X, task.y, params.alpha, params.l1_ratio, tol=1e-8)


@dataclass(frozen=True)
class MonthPrediction:
    """One predicted month: truth is None when that month lies past the data."""

    key: MonthKey
    y_true: float | None
    y_pred: float


def predict_validation(model: LinearModel, train: Dataset, validation: Dataset,
                       m: int) -> list:
    """Predict every validation month (plus the one just past the end).

    Each target month t is predicted from the lag window ending at t-1;
    windows may reach back into training months.
    """
    if validation.first_key() != train.last_key().successor():
        raise ContinuityError(
            f"validation must start at {train.last_key().successor()}, "
            f"starts at {validation.first_key()}"
        )
    if len(train) < m:
        raise InsufficientDataError(
            f"need at least {m} training months for lag depth {m}, got {len(train)}"
        )
    combined = concat(train, validation)
    predictions = []
    first_target = validation.first_key()
    last_target = validation.last_key().successor()
    target_key = first_target
    while target_key <= last_target:
        instance_key = target_key.shifted(-1)
        row = []
        for k in range(m):
            row.extend(combined.get(instance_key.shifted(-k)).feature_values())
        y_pred = float(model.predict(np.asarray(row))[0])
        record = combined.get(target_key)
        y_true = record.prev if record is not None else None
        predictions.append(MonthPrediction(key=target_key, y_true=y_true, y_pred=y_pred))
        target_key = target_key.successor()
    return predictions


def tolerance_band_eval(pairs, lower: float = TOLERANCE_LOWER,
                        upper: float = TOLERANCE_UPPER) -> dict:
    """Judge (key, y_true, y_pred) triples against the closed band
    [y_true + lower, y_true + upper] and report per-season hit fractions."""
    pairs = list(pairs)
    if not pairs:
        raise ValueError("tolerance_band_eval needs at least one scored pair")
    in_band = []
    season_hits = {"rainy": 0, "dry": 0}
    season_totals = {"rainy": 0, "dry": 0}
    for key, y_true, y_pred in pairs:
        hit = y_true + lower <= y_pred <= y_true + upper
        in_band.append(bool(hit))
        season = season_of(key.month)
        season_totals[season] += 1
        season_hits[season] += int(hit)
    fractions = {
        s: (season_hits[s] / season_totals[s] if season_totals[s] else None)
        for s in ("rainy", "dry")
    }
    return {
        "in_band": in_band,
        "overall_fraction": sum(in_band) / len(in_band),
        "season_fractions": fractions,
    }


@dataclass(frozen=True)
class MonthOutcome:
    key: MonthKey
    y_true: float | None
    y_pred_raw: float
    y_pred: float
    clamped: bool
    season: str
    in_band: bool | None
    novelty: str | None
    novelty_z: float | None

    def to_dict(self) -> dict:
        return {
            "month": str(self.key),
            "season": self.season,
            "y_true": self.y_true,
            "y_pred": self.y_pred,
            "y_pred_raw": self.y_pred_raw,
            "clamped": self.clamped,
            "in_band": self.in_band,
            "novelty": self.novelty,
            "novelty_z": self.novelty_z,
        }


@dataclass(frozen=True)
class TaskValidation:
    task: int
    alpha: float
    l1_ratio: float
    months: tuple
    yearly: dict
    in_band_fraction: float
    season_fractions: dict
    training_abs_residuals: dict  # calendar month -> tuple of |residual|

    def to_dict(self) -> dict:
        return {
            "task": self.task,
            "alpha": self.alpha,
            "l1_ratio": self.l1_ratio,
            "months": [mo.to_dict() for mo in self.months],
            "yearly": {str(year): dict(metrics) for year, metrics in self.yearly.items()},
            "in_band_fraction": self.in_band_fraction,
            "season_fractions": dict(self.season_fractions),
            "training_abs_residuals": {
                str(month): list(vals)
                for month, vals in self.training_abs_residuals.items()
            },
        }


@dataclass(frozen=True)
class ValidationReport:
    boundary: MonthKey
    tolerance_lower: float
    tolerance_upper: float
    novelty_window_sds: float
    tasks: tuple
    overall_in_band_fraction: float
    novelty_flagged: tuple

    def to_dict(self) -> dict:
        return {
            "boundary": str(self.boundary),
            "tolerance_lower": self.tolerance_lower,
            "tolerance_upper": self.tolerance_upper,
            "novelty_window_sds": self.novelty_window_sds,
            "tasks": [t.to_dict() for t in self.tasks],
            "overall_in_band_fraction": self.overall_in_band_fraction,
            "novelty_flagged": [
                {"task": task, "month": month} for task, month in self.novelty_flagged
            ],
        }


def _novelty_assess(training_hist: dict, scored: list, window_sds: float) -> dict:
    """Per-month novelty status from calendar-month residual histories.

    ``scored`` is a chronological list of (key, abs_residual). The history
    for a month combines training residuals of that calendar month with
    scored validation residuals from earlier years; months with fewer than
    MIN_NOVELTY_HISTORY points (or zero spread) are marked
    insufficient-history rather than silently passed.
    """
    out = {}
    for key, resid in scored:
        hist = list(training_hist.get(key.month, ()))
        hist.extend(r for k, r in scored if k.month == key.month and k.year < key.year)
        if len(hist) < MIN_NOVELTY_HISTORY:
            out[key] = ("insufficient-history", None)
            continue
        sd = float(np.std(hist))
        if sd == 0.0:
            out[key] = ("insufficient-history", None)
            continue
        z = (resid - float(np.mean(hist))) / sd
        out[key] = ("flagged" if z > window_sds else "ok", float(z))
    return out


def novelty_flag(report: ValidationReport, window_sds: float) -> tuple:
    """Re-run novelty detection on a finished report at a given threshold.

    Returns ((task, MonthKey), ...) for months whose absolute residual sits
    more than ``window_sds`` standard deviations above that calendar month's
    historical mean residual.
    """
    if window_sds <= 0:
        raise ValueError(f"window_sds must be > 0, got {window_sds}")
    flagged = []
    for task_rep in report.tasks:
        scored = [
            (mo.key, abs(mo.y_pred - mo.y_true))
            for mo in task_rep.months if mo.y_true is not None
        ]
        hist = {int(m): vals for m, vals in task_rep.training_abs_residuals.items()}
        statuses = _novelty_assess(hist, scored, window_sds)
        for key, (status, _) in statuses.items():
            if status == "flagged":
                flagged.append((task_rep.task, key))
    return tuple(flagged)


def _clamp01(value: float) -> float:
    return min(1.0, max(0.0, value))


def _run_task(train: Dataset, validation: Dataset, config: LempsConfig,
              m: int) -> TaskValidation:
    params = config.task_params[m]
    model = train_final(train, config, m)
    predictions = predict_validation(model, train, validation, m)

    training_task = encode_task(train, m)
    train_preds = np.clip(model.predict(training_task.X), 0.0, 1.0)
    training_hist: dict = {}
    for key, y_true, y_hat in zip(training_task.instance_keys, training_task.y, train_preds):
        target_month = key.successor().month
        training_hist.setdefault(target_month, []).append(abs(float(y_hat) - float(y_true)))
    training_hist = {mth: tuple(vals) for mth, vals in training_hist.items()}

    scored_pairs = []
    scored_resid = []
    for pred in predictions:
        if pred.y_true is None:
            continue
        clamped_pred = _clamp01(pred.y_pred)
        scored_pairs.append((pred.key, pred.y_true, clamped_pred))
        scored_resid.append((pred.key, abs(clamped_pred - pred.y_true)))
    band = tolerance_band_eval(scored_pairs, config.tolerance_lower, config.tolerance_upper)
    in_band_by_key = {pair[0]: hit for pair, hit in zip(scored_pairs, band["in_band"])}
    novelty_by_key = _novelty_assess(training_hist, scored_resid,
                                     config.novelty_window_sds)

    outcomes = []
    for pred in predictions:
        clamped_pred = _clamp01(pred.y_pred)
        scored = pred.y_true is not None
        status, z = novelty_by_key.get(pred.key, (None, None))
        outcomes.append(MonthOutcome(
            key=pred.key,
            y_true=pred.y_true,
            y_pred_raw=pred.y_pred,
            y_pred=clamped_pred,
            clamped=clamped_pred != pred.y_pred,
            season=season_of(pred.key.month),
            in_band=in_band_by_key.get(pred.key) if scored else None,
            novelty=status,
            novelty_z=z,
        ))

    yearly = {}
    years = sorted({key.year for key, _, _ in scored_pairs})
    for year in years:
        truths = np.array([t for k, t, _ in scored_pairs if k.year == year])
        preds = np.array([p for k, _, p in scored_pairs if k.year == year])
        try:
            pcc_val = eval_pcc(truths, preds) if truths.shape[0] >= 2 else None
        except UndefinedCorrelationError:
            pcc_val = None
        yearly[year] = {
            "mae": eval_mae(truths, preds),
            "mse": eval_mse(truths, preds),
            "pcc": pcc_val,
            "n_scored": int(truths.shape[0]),
        }

    return TaskValidation(
        task=m,
        alpha=params.alpha,
        l1_ratio=params.l1_ratio,
        months=tuple(outcomes),
        yearly=yearly,
        in_band_fraction=band["overall_fraction"],
        season_fractions=band["season_fractions"],
        training_abs_residuals=training_hist,
    )


def run_validation(train: Dataset, validation: Dataset,
                   config: LempsConfig) -> ValidationReport:
    """Run the full six-task pipeline and assemble the validation report."""
    tasks = tuple(_run_task(train, validation, config, m) for m in TASK_DEPTHS)
    scored_flags = [
        mo.in_band for task in tasks for mo in task.months if mo.in_band is not None
    ]
    overall = sum(scored_flags) / len(scored_flags) if scored_flags else math.nan
    flagged = tuple(
        (task.task, str(mo.key))
        for task in tasks for mo in task.months if mo.novelty == "flagged"
    )
    return ValidationReport(
        boundary=config.boundary,
        tolerance_lower=config.tolerance_lower,
        tolerance_upper=config.tolerance_upper,
        novelty_window_sds=config.novelty_window_sds,
        tasks=tasks,
        overall_in_band_fraction=overall,
        novelty_flagged=flagged,
    )


def write_validation_csv(report: ValidationReport, path) -> None:
    """Flat plot-feed: task,year,month,y_true,y_pred,in_band,season,novelty."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["task", "year", "month", "y_true", "y_pred",
                         "in_band", "season", "novelty"])
        for task in report.tasks:
            for mo in task.months:
                writer.writerow([
                    task.task,
                    mo.key.year,
                    mo.key.month,
                    "" if mo.y_true is None else repr(mo.y_true),
                    repr(mo.y_pred),
                    "" if mo.in_band is None else ("true" if mo.in_band else "false"),
                    mo.season,
                    "" if mo.novelty is None else mo.novelty,
                ])
