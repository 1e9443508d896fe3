"""Seeded synthetic monthly-dataset generator.

Produces a plausible stand-in for a private multi-year screening dataset:
seasonal prevalence with a slow trend, rainfall tracking the season profile,
temperatures moving against rainfall, and screening counts with binomially
realized positives so prevalence is always an achievable proportion.

Every month draws from its own RNG stream, spawned from (seed, year-offset,
month), so editing one month's parameters (a shock) cannot shift any other
month's values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dataset import Dataset, MonthKey, MonthlyRecord

DEFAULT_RAIN_MONTHS = frozenset(range(4, 12))  # April through November


@dataclass(frozen=True)
class ShockSpec:
    """A one-month disruption: screening scaled, prevalence shifted."""

    key: MonthKey
    screening_multiplier: float = 1.0
    prevalence_delta: float = 0.0

    def __post_init__(self):
        if self.screening_multiplier <= 0:
            raise ValueError(
                f"screening_multiplier must be > 0, got {self.screening_multiplier}"
            )


@dataclass(frozen=True)
class SynthSpec:
    seed: int = 0
    n_years: int = 22
    start_year: int = 1996
    base_prevalence: float = 0.3
    seasonal_amplitude: float = 0.1
    trend_per_year: float = -0.005
    rain_season_months: frozenset = DEFAULT_RAIN_MONTHS
    noise_sd: float = 0.02
    mean_screened: int = 400
    shock_months: tuple = ()
    exact_proportions: bool = False

    def validate(self) -> None:
        if self.seed < 0:
            raise ValueError(f"seed must be >= 0, got {self.seed}")
        if self.n_years < 1:
            raise ValueError(f"n_years must be >= 1, got {self.n_years}")
        if not 0.0 < self.base_prevalence < 1.0:
            raise ValueError(
                f"base_prevalence must lie in (0, 1), got {self.base_prevalence}"
            )
        if self.seasonal_amplitude < 0:
            raise ValueError(
                f"seasonal_amplitude must be >= 0, got {self.seasonal_amplitude}"
            )
        if self.noise_sd < 0:
            raise ValueError(f"noise_sd must be >= 0, got {self.noise_sd}")
        if self.mean_screened < 10:
            raise ValueError(f"mean_screened must be >= 10, got {self.mean_screened}")
        if not self.rain_season_months:
            raise ValueError("rain_season_months must be nonempty")
        if not all(1 <= m <= 12 for m in self.rain_season_months):
            raise ValueError("rain_season_months entries must lie in 1..12")
        for shock in self.shock_months:
            shock.__post_init__()


def _season_profile(month: int, rain_months) -> float:
    """Raised cosine over the rainy months, 0 outside, peaking mid-season."""
    ordered = sorted(rain_months)
    if month not in rain_months:
        return 0.0
    pos = ordered.index(month)
    return 0.5 * (1.0 - math.cos(2.0 * math.pi * (pos + 0.5) / len(ordered)))


def _month_record(spec: SynthSpec, year_offset: int, month: int,
                  shock: ShockSpec | None) -> tuple:
    """One month's record fields (rainfall returned separately for the
    yearly-proportion pass)."""
    rng = np.random.Generator(np.random.PCG64(
        np.random.SeedSequence(spec.seed, spawn_key=(year_offset, month))
    ))
    s = _season_profile(month, spec.rain_season_months)

    prev_noise = rng.normal(0.0, spec.noise_sd) if spec.noise_sd > 0 else 0.0
    screened = max(1, int(rng.poisson(spec.mean_screened)))
    rain_noise = rng.normal(0.0, 1.0)
    temp_noise = rng.normal(0.0, 1.0, size=3)
    age_noise = rng.normal(0.0, 1.0, size=4)
    pd_noise = rng.normal(0.0, 1.0, size=2)

    target = spec.base_prevalence + spec.seasonal_amplitude * s \
        + spec.trend_per_year * year_offset + prev_noise
    if shock is not None:
        target += shock.prevalence_delta
        screened = max(1, round(screened * shock.screening_multiplier))
    target = float(np.clip(target, 0.01, 0.99))

    if spec.exact_proportions:
        prev = target
    else:
        prev = rng.binomial(screened, target) / screened

    mm_rf = max(0.0, (8.0 + 250.0 * s) * (1.0 + 0.25 * rain_noise))
    x_temp = 31.0 - 5.0 * s + 0.5 * temp_noise[0]
    min_temp = x_temp - (4.0 + abs(temp_noise[1]))
    max_temp = x_temp + (4.0 + abs(temp_noise[2]))
    x_pd = max(0.0, 18000.0 * (0.5 + target) * (1.0 + 0.2 * pd_noise[0]))
    sd_pd = max(0.0, x_pd * (0.8 + 0.15 * pd_noise[1]))

    fields = dict(
        number_screened=screened,
        median_age_neg=max(0.0, 26.0 + 2.0 * age_noise[0]),
        median_age_pos=max(0.0, 35.0 + 2.0 * age_noise[1]),
        iqr_age_neg=max(0.0, 48.0 + 2.0 * age_noise[2]),
        iqr_age_pos=max(0.0, 44.0 + 2.0 * age_noise[3]),
        x_pd=x_pd,
        sd_pd=sd_pd,
        min_temp=min_temp,
        max_temp=max_temp,
        x_temp=x_temp,
        prev=prev,
    )
    return mm_rf, fields


def generate(spec: SynthSpec) -> Dataset:
    """Build the full dataset described by ``spec`` (deterministic per seed)."""
    spec.validate()
    shocks = {shock.key: shock for shock in spec.shock_months}
    records = []
    for year_offset in range(spec.n_years):
        year = spec.start_year + year_offset
        rainfall = np.empty(12)
        month_fields = []
        for month in range(1, 13):
            key = MonthKey(year, month)
            mm_rf, fields = _month_record(spec, year_offset, month, shocks.get(key))
            rainfall[month - 1] = mm_rf
            month_fields.append((key, fields))
        total_rf = rainfall.sum()
        for month, (key, fields) in enumerate(month_fields):
            mm_rf = float(rainfall[month])
            mmP_rf = float(mm_rf / total_rf) if total_rf > 0 else 0.0
            records.append(MonthlyRecord(key=key, mm_rf=mm_rf, mmP_rf=mmP_rf, **fields))
    return Dataset(records)
