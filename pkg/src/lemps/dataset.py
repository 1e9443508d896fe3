"""Monthly data model, CSV ingestion and the lag-window task encoder.

A dataset is an ordered, gap-free sequence of monthly aggregate records
(15 variables per month). Regression tasks are encoded by stacking the most
recent ``m`` months' variables (year excluded) as features and taking the
following month's prevalence as the target.
"""

from __future__ import annotations

import csv
from bisect import bisect_right
from dataclasses import dataclass

import numpy as np

from .errors import (
    ContinuityError,
    InsufficientDataError,
    ParseError,
    SchemaError,
    ValidationError,
)

#: Canonical CSV header, in file order.
CSV_COLUMNS = (
    "year", "month", "number_screened",
    "median_age_neg", "median_age_pos", "iqr_age_neg", "iqr_age_pos",
    "x_pd", "sd_pd", "mm_rf", "mmP_rf",
    "min_temp", "max_temp", "x_temp", "prev",
)

#: Per-month feature fields in canonical order (year excluded).
FEATURE_FIELDS = CSV_COLUMNS[1:]

MIN_YEAR = 1900
MAX_YEAR = 2200


def parasite_density(mp_count: int, wbc_count: int) -> float:
    """Parasites per microliter: (malaria parasites / white blood cells) * 8000."""
    if mp_count < 0:
        raise ValueError(f"mp_count must be >= 0, got {mp_count}")
    if wbc_count == 0:
        raise ZeroDivisionError("parasite density undefined for wbc_count = 0")
    if wbc_count < 0:
        raise ValueError(f"wbc_count must be >= 1, got {wbc_count}")
    return (mp_count / wbc_count) * 8000.0


def prevalence(positives: int, screened: int) -> float:
    """Proportion of screened individuals with confirmed malaria."""
    if screened == 0:
        raise ZeroDivisionError("prevalence undefined for screened = 0")
    if screened < 0:
        raise ValueError(f"screened must be >= 1, got {screened}")
    if positives < 0 or positives > screened:
        raise ValueError(f"positives must lie in [0, screened], got {positives} of {screened}")
    return positives / screened


@dataclass(frozen=True, order=True)
class MonthKey:
    """A (year, month) calendar key with lexicographic ordering."""

    year: int
    month: int

    def __post_init__(self):
        if not 1 <= self.month <= 12:
            raise ValueError(f"month must be in 1..12, got {self.month}")
        if not MIN_YEAR <= self.year <= MAX_YEAR:
            raise ValueError(f"year must be in [{MIN_YEAR}, {MAX_YEAR}], got {self.year}")

    def index(self) -> int:
        """Months since year 0, usable for gap arithmetic."""
        return self.year * 12 + (self.month - 1)

    @classmethod
    def from_index(cls, idx: int) -> "MonthKey":
        return cls(idx // 12, idx % 12 + 1)

    def successor(self) -> "MonthKey":
        return MonthKey.from_index(self.index() + 1)

    def shifted(self, months: int) -> "MonthKey":
        return MonthKey.from_index(self.index() + months)

    @classmethod
    def parse(cls, text: str) -> "MonthKey":
        """Parse 'YYYY-MM'."""
        parts = text.split("-")
        if len(parts) != 2:
            raise ValueError(f"expected YYYY-MM, got {text!r}")
        try:
            year, month = int(parts[0]), int(parts[1])
        except ValueError:
            raise ValueError(f"expected YYYY-MM, got {text!r}") from None
        return cls(year, month)

    def __str__(self) -> str:
        return f"{self.year:04d}-{self.month:02d}"


@dataclass(frozen=True)
class MonthlyRecord:
    """One month's 15 aggregated variables."""

    key: MonthKey
    number_screened: int
    median_age_neg: float
    median_age_pos: float
    iqr_age_neg: float
    iqr_age_pos: float
    x_pd: float
    sd_pd: float
    mm_rf: float
    mmP_rf: float
    min_temp: float
    max_temp: float
    x_temp: float
    prev: float

    def __post_init__(self):
        if self.number_screened < 1:
            raise ValueError("number_screened must be >= 1 (zero-screened months are rejected)")
        if not 0.0 <= self.prev <= 1.0:
            raise ValueError(f"prev must lie in [0, 1], got {self.prev}")
        if not 0.0 <= self.mmP_rf <= 1.0:
            raise ValueError(f"mmP_rf must lie in [0, 1], got {self.mmP_rf}")
        if self.mm_rf < 0.0:
            raise ValueError(f"mm_rf must be >= 0, got {self.mm_rf}")
        if not self.min_temp <= self.x_temp <= self.max_temp:
            raise ValueError(
                f"temperatures must satisfy min <= mean <= max, got "
                f"{self.min_temp}/{self.x_temp}/{self.max_temp}"
            )
        for name in ("median_age_neg", "median_age_pos", "iqr_age_neg",
                     "iqr_age_pos", "x_pd", "sd_pd"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be >= 0, got {getattr(self, name)}")

    def feature_values(self) -> tuple:
        """The 14 feature fields in canonical order (month first, year excluded)."""
        return (float(self.key.month), float(self.number_screened),
                self.median_age_neg, self.median_age_pos,
                self.iqr_age_neg, self.iqr_age_pos,
                self.x_pd, self.sd_pd, self.mm_rf, self.mmP_rf,
                self.min_temp, self.max_temp, self.x_temp, self.prev)


class Dataset:
    """An immutable, strictly consecutive sequence of monthly records."""

    __slots__ = ("_records", "_indices")

    def __init__(self, records):
        records = tuple(records)
        if not records:
            raise ValueError("a dataset needs at least one record")
        for prev_rec, rec in zip(records, records[1:]):
            gap = rec.key.index() - prev_rec.key.index()
            if gap == 0:
                raise ContinuityError(f"duplicate month {rec.key}")
            if gap < 0:
                raise ContinuityError(f"records out of order at {rec.key}")
            if gap > 1:
                missing = prev_rec.key.successor()
                raise ContinuityError(f"month gap: missing {missing}")
        object.__setattr__(self, "_records", records)
        object.__setattr__(self, "_indices", tuple(r.key.index() for r in records))

    @property
    def records(self) -> tuple:
        return self._records

    def __len__(self) -> int:
        return len(self._records)

    def __getitem__(self, i) -> MonthlyRecord:
        return self._records[i]

    def __iter__(self):
        return iter(self._records)

    def __eq__(self, other) -> bool:
        return isinstance(other, Dataset) and self._records == other._records

    def first_key(self) -> MonthKey:
        return self._records[0].key

    def last_key(self) -> MonthKey:
        return self._records[-1].key

    def get(self, key: MonthKey):
        """Record for ``key`` or None."""
        offset = key.index() - self._indices[0]
        if 0 <= offset < len(self._records):
            return self._records[offset]
        return None

    def __repr__(self) -> str:
        return f"Dataset({self.first_key()}..{self.last_key()}, {len(self)} months)"


@dataclass(frozen=True)
class EncodedTask:
    """Design matrix and next-month targets for one lag depth."""

    lag_depth: int
    feature_names: tuple
    X: np.ndarray
    y: np.ndarray
    instance_keys: tuple

    def __post_init__(self):
        self.X.setflags(write=False)
        self.y.setflags(write=False)

    @property
    def n_rows(self) -> int:
        return self.X.shape[0]

    @property
    def n_features(self) -> int:
        return self.X.shape[1]


def _parse_row(row: dict, line_no: int) -> MonthlyRecord:
    def cell_int(name):
        raw = row[name]
        try:
            return int(raw)
        except ValueError:
            raise ParseError(f"row {line_no}, column {name!r}: cannot parse {raw!r} as integer") from None

    def cell_float(name):
        raw = row[name]
        try:
            return float(raw)
        except ValueError:
            raise ParseError(f"row {line_no}, column {name!r}: cannot parse {raw!r} as number") from None

    year, month = cell_int("year"), cell_int("month")
    try:
        key = MonthKey(year, month)
        return MonthlyRecord(
            key=key,
            number_screened=cell_int("number_screened"),
            median_age_neg=cell_float("median_age_neg"),
            median_age_pos=cell_float("median_age_pos"),
            iqr_age_neg=cell_float("iqr_age_neg"),
            iqr_age_pos=cell_float("iqr_age_pos"),
            x_pd=cell_float("x_pd"),
            sd_pd=cell_float("sd_pd"),
            mm_rf=cell_float("mm_rf"),
            mmP_rf=cell_float("mmP_rf"),
            min_temp=cell_float("min_temp"),
            max_temp=cell_float("max_temp"),
            x_temp=cell_float("x_temp"),
            prev=cell_float("prev"),
        )
    except ValueError as exc:
        raise ValidationError(f"row {line_no}: {exc}") from None


def load_csv(path) -> Dataset:
    """Read a canonical monthly CSV into a validated Dataset.

    Rows are sorted by (year, month) before validation, so unsorted but
    otherwise valid files load fine. Raises SchemaError, ParseError,
    ValidationError or ContinuityError as appropriate.
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError("empty file: missing header row") from None
        if tuple(header) != CSV_COLUMNS:
            missing = [c for c in CSV_COLUMNS if c not in header]
            extra = [c for c in header if c not in CSV_COLUMNS]
            if missing:
                raise SchemaError(f"missing column(s): {', '.join(missing)}")
            if extra:
                raise SchemaError(f"unexpected column(s): {', '.join(extra)}")
            raise SchemaError("columns present but out of canonical order")
        rows = []
        for line_no, cells in enumerate(reader, start=2):
            if not cells:
                continue
            if len(cells) != len(CSV_COLUMNS):
                raise SchemaError(f"row {line_no}: expected {len(CSV_COLUMNS)} cells, got {len(cells)}")
            rows.append((dict(zip(CSV_COLUMNS, cells)), line_no))
    records = [_parse_row(row, line_no) for row, line_no in rows]
    records.sort(key=lambda r: r.key)
    return Dataset(records)


def _format_cell(value) -> str:
    if isinstance(value, int):
        return str(value)
    return repr(float(value))


def write_csv(data: Dataset, path) -> None:
    """Write a Dataset in canonical form (load_csv round-trips byte-identically)."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for rec in data:
            writer.writerow([
                rec.key.year, rec.key.month, rec.number_screened,
                _format_cell(rec.median_age_neg), _format_cell(rec.median_age_pos),
                _format_cell(rec.iqr_age_neg), _format_cell(rec.iqr_age_pos),
                _format_cell(rec.x_pd), _format_cell(rec.sd_pd),
                _format_cell(rec.mm_rf), _format_cell(rec.mmP_rf),
                _format_cell(rec.min_temp), _format_cell(rec.max_temp),
                _format_cell(rec.x_temp), _format_cell(rec.prev),
            ])


def encode_task(data: Dataset, m: int, target_horizon_source: Dataset | None = None) -> EncodedTask:
    """Encode the lag-``m`` next-month prevalence regression task.

    One row per month t such that months t-(m-1)..t all lie in ``data`` and
    month t+1's prevalence is available, either inside ``data`` or as the
    first record of ``target_horizon_source`` (which must start exactly one
    month after ``data`` ends). Features are the lag-0 block first, then
    lag-1 .. lag-(m-1); within a block, fields follow canonical order with
    the year column removed, giving 14*m columns.
    """
    if not isinstance(m, int) or not 1 <= m <= 6:
        raise ValueError(f"lag depth m must be an integer in 1..6, got {m!r}")
    if len(data) < m + 1:
        raise InsufficientDataError(
            f"need at least {m + 1} months for lag depth {m}, got {len(data)}"
        )
    horizon_prev = None
    if target_horizon_source is not None:
        expected = data.last_key().successor()
        if target_horizon_source.first_key() != expected:
            raise ContinuityError(
                f"horizon source must start at {expected}, "
                f"starts at {target_horizon_source.first_key()}"
            )
        horizon_prev = target_horizon_source[0].prev

    names = tuple(f"{field}_lag{k}" for k in range(m) for field in FEATURE_FIELDS)
    rows, targets, keys = [], [], []
    n = len(data)
    for t in range(m - 1, n):
        if t + 1 < n:
            target = data[t + 1].prev
        elif horizon_prev is not None:
            target = horizon_prev
        else:
            continue
        row = []
        for k in range(m):
            row.extend(data[t - k].feature_values())
        rows.append(row)
        targets.append(target)
        keys.append(data[t].key)

    X = np.asarray(rows, dtype=np.float64).reshape(len(rows), 14 * m)
    y = np.asarray(targets, dtype=np.float64)
    return EncodedTask(lag_depth=m, feature_names=names, X=X, y=y, instance_keys=tuple(keys))


def split_train_validation(data: Dataset, boundary: MonthKey) -> tuple:
    """Split into (months <= boundary, months > boundary).

    The boundary must lie strictly inside the dataset's range so that both
    parts are nonempty.
    """
    if not data.first_key() <= boundary < data.last_key():
        raise ValueError(
            f"boundary {boundary} must lie strictly inside {data.first_key()}..{data.last_key()}"
        )
    cut = bisect_right([r.key for r in data], boundary)
    return Dataset(data.records[:cut]), Dataset(data.records[cut:])


def concat(first: Dataset, second: Dataset) -> Dataset:
    """Concatenate two contiguous datasets (second must directly follow first)."""
    if second.first_key() != first.last_key().successor():
        raise ContinuityError(
            f"datasets are not contiguous: {first.last_key()} then {second.first_key()}"
        )
    return Dataset(first.records + second.records)
