"""Command-line orchestration: synth, select, tune-en, validate.

Every command is a pure function of its input files, flags and seed;
re-running reproduces outputs byte-identically. A manifest documenting the
run is written next to each output. Exit codes: 0 success, 2 usage or
validation problem, 1 internal error.
"""

from __future__ import annotations

import functools
import json
import sys
from pathlib import Path

import click
import numpy as np

from . import __version__, serialize
from .dataset import MonthKey, load_csv, split_train_validation, write_csv, encode_task
from .errors import LempsError
from .evaluation import (
    ESTIMATOR_NAMES,
    L1_RATIO_GRID,
    EstimatorSpec,
    repeat_holdout,
)
from .pipeline import (
    LempsConfig,
    TaskParams,
    config_from_tuning,
    run_validation,
    write_validation_csv,
)
from .synth import ShockSpec, SynthSpec, generate

_SPEC_FIELDS = {
    "seed", "n_years", "start_year", "base_prevalence", "seasonal_amplitude",
    "trend_per_year", "rain_season_months", "noise_sd", "mean_screened",
    "shock_months", "exact_proportions",
}
_SHOCK_FIELDS = {"year", "month", "screening_multiplier", "prevalence_delta"}


def _guard(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except click.ClickException:
            raise
        except (LempsError, ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
            click.echo(f"lemps: error: {exc}", err=True)
            sys.exit(2)
        except Exception as exc:
            click.echo(f"lemps: internal error: {type(exc).__name__}: {exc}", err=True)
            sys.exit(1)
    return wrapper


def _parse_tasks(text: str) -> tuple:
    """'1-6', '2', or '1,3,5' into a sorted tuple of lag depths."""
    items: set = set()
    for part in text.split(","):
        part = part.strip()
        if "-" in part[1:]:
            lo, hi = part.split("-", 1)
            items.update(range(int(lo), int(hi) + 1))
        elif part:
            items.add(int(part))
    if not items or not items.issubset(set(range(1, 7))):
        raise ValueError(f"tasks must be lag depths within 1..6, got {text!r}")
    return tuple(sorted(items))


def _parse_estimators(text: str) -> tuple:
    names = tuple(part.strip() for part in text.split(",") if part.strip())
    for name in names:
        if name not in ESTIMATOR_NAMES:
            raise ValueError(
                f"unknown estimator {name!r}; valid names: {', '.join(ESTIMATOR_NAMES)}"
            )
    if not names:
        raise ValueError("no estimators given")
    return names


def _load_synth_spec(path, seed_override) -> SynthSpec:
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict):
        raise ValueError("generator spec must be a JSON object")
    unknown = set(raw) - _SPEC_FIELDS
    if unknown:
        raise ValueError(f"unknown generator spec field(s): {', '.join(sorted(unknown))}")
    kwargs = dict(raw)
    if "rain_season_months" in kwargs:
        kwargs["rain_season_months"] = frozenset(int(m) for m in kwargs["rain_season_months"])
    shocks = []
    for entry in kwargs.pop("shock_months", ()):
        unknown = set(entry) - _SHOCK_FIELDS
        if unknown:
            raise ValueError(f"unknown shock field(s): {', '.join(sorted(unknown))}")
        shocks.append(ShockSpec(
            key=MonthKey(int(entry["year"]), int(entry["month"])),
            screening_multiplier=float(entry.get("screening_multiplier", 1.0)),
            prevalence_delta=float(entry.get("prevalence_delta", 0.0)),
        ))
    kwargs["shock_months"] = tuple(shocks)
    if seed_override is not None:
        kwargs["seed"] = seed_override
    try:
        spec = SynthSpec(**kwargs)
    except TypeError as exc:
        raise ValueError(f"bad generator spec: {exc}") from None
    spec.validate()
    return spec


def _write_manifest(out_path: Path, command: str, inputs: dict, seed,
                    overrides: dict, outputs: list) -> None:
    manifest = {
        "command": command,
        "version": __version__,
        "inputs": {k: str(v) for k, v in inputs.items()},
        "seed": seed,
        "overrides": overrides,
        "outputs": [str(p) for p in outputs],
    }
    serialize.dump_path(str(out_path) + ".manifest.json", manifest)


def _cell_seed(seed: int, task: int) -> int:
    """Per-task master seed so every estimator sees identical splits."""
    return int(np.random.SeedSequence(seed, spawn_key=(task,)).generate_state(1)[0])


@click.group()
@click.version_option(version=__version__, prog_name="lemps")
def main():
    """Locality-specific elastic-net malaria prevalence prediction."""


@main.command()
@click.option("--config", "spec_path", required=True, type=click.Path(exists=True, dir_okay=False),
              help="Generator spec (JSON).")
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False),
              help="Output dataset CSV.")
@click.option("--seed", type=int, default=None, help="Override the spec seed.")
@_guard
def synth(spec_path, out_path, seed):
    """Generate a synthetic monthly dataset."""
    spec = _load_synth_spec(spec_path, seed)
    data = generate(spec)
    out = Path(out_path)
    write_csv(data, out)
    _write_manifest(out, "synth", {"spec": spec_path}, spec.seed,
                    {} if seed is None else {"seed": seed}, [out])
    click.echo(f"wrote {len(data)} months to {out}")


def _holdout_run(data_path, boundary_text, tasks_text, repeats, seed, out_path,
                 command, estimators):
    data = load_csv(data_path)
    boundary = MonthKey.parse(boundary_text)
    train, _ = split_train_validation(data, boundary)
    tasks = _parse_tasks(tasks_text)
    reports = []
    for m in tasks:
        encoded = encode_task(train, m)
        cell_seed = _cell_seed(seed, m)
        for spec in estimators:
            rep = repeat_holdout(encoded, spec, n_repeats=repeats, master_seed=cell_seed)
            reports.append(rep.to_dict())
    doc = {
        "command": command,
        "boundary": str(boundary),
        "tasks": list(tasks),
        "repeats": repeats,
        "seed": seed,
        "reports": reports,
    }
    out = Path(out_path)
    serialize.dump_path(out, doc)
    _write_manifest(out, command, {"data": data_path}, seed,
                    {"boundary": boundary_text, "tasks": tasks_text,
                     "estimators": [spec.name for spec in estimators],
                     "repeats": repeats}, [out])
    return len(reports)


@main.command()
@click.option("--data", "data_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--boundary", required=True, help="Last training month, YYYY-MM.")
@click.option("--tasks", default="1-6", show_default=True)
@click.option("--estimators", default=",".join(ESTIMATOR_NAMES), show_default=True)
@click.option("--repeats", type=int, default=1000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@_guard
def select(data_path, boundary, tasks, estimators, repeats, seed, out_path):
    """Repeated-holdout comparison of estimators across lag tasks."""
    specs = tuple(EstimatorSpec(name) for name in _parse_estimators(estimators))
    n = _holdout_run(data_path, boundary, tasks, repeats, seed, out_path,
                     "select", specs)
    click.echo(f"wrote {n} aggregate report(s) to {out_path}")


@main.command("tune-en")
@click.option("--data", "data_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--boundary", required=True, help="Last training month, YYYY-MM.")
@click.option("--tasks", default="1-6", show_default=True)
@click.option("--repeats", type=int, default=1000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@_guard
def tune_en(data_path, boundary, tasks, repeats, seed, out_path):
    """Tune elastic-net strength and L1 ratio per task by repeated holdout."""
    spec = EstimatorSpec("EN", l1_grid=L1_RATIO_GRID)
    n = _holdout_run(data_path, boundary, tasks, repeats, seed, out_path,
                     "tune-en", (spec,))
    click.echo(f"wrote {n} aggregate report(s) to {out_path}")


def _load_lemps_config(path, boundary: MonthKey) -> LempsConfig:
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    if "reports" in raw:
        return config_from_tuning(raw["reports"], boundary)
    if "tasks" not in raw:
        raise ValueError("config must contain either 'tasks' or tuning 'reports'")
    params = {}
    for key, entry in raw["tasks"].items():
        params[int(key)] = TaskParams(alpha=float(entry["alpha"]),
                                      l1_ratio=float(entry["l1_ratio"]))
    kwargs = {}
    for name in ("tolerance_upper", "tolerance_lower", "novelty_window_sds"):
        if name in raw:
            kwargs[name] = float(raw[name])
    return LempsConfig(task_params=params, boundary=boundary, **kwargs)


@main.command()
@click.option("--data", "data_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--boundary", required=True, help="Last training month, YYYY-MM.")
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="Per-task parameters (manual config or tune-en output).")
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False),
              help="Report JSON; the plot CSV lands next to it with a .csv suffix.")
@_guard
def validate(data_path, boundary, config_path, out_path):
    """Train final per-task models and validate on the held-back months."""
    data = load_csv(data_path)
    boundary_key = MonthKey.parse(boundary)
    train, valid = split_train_validation(data, boundary_key)
    config = _load_lemps_config(config_path, boundary_key)
    report = run_validation(train, valid, config)
    out = Path(out_path)
    csv_out = out.with_suffix(".csv")
    serialize.dump_path(out, {"command": "validate", "report": report.to_dict()})
    write_validation_csv(report, csv_out)
    _write_manifest(out, "validate", {"data": data_path, "config": config_path},
                    None, {"boundary": boundary}, [out, csv_out])
    click.echo(
        f"validated {len(report.tasks)} task(s); overall in-band fraction "
        f"{report.overall_in_band_fraction:.3f}"
    )


if __name__ == "__main__":
    main()
