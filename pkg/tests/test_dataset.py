import numpy as np
import pytest

from lemps.dataset import (
    CSV_COLUMNS,
    Dataset,
    MonthKey,
    MonthlyRecord,
    concat,
    encode_task,
    load_csv,
    parasite_density,
    prevalence,
    split_train_validation,
    write_csv,
)
from lemps.errors import (
    ContinuityError,
    InsufficientDataError,
    ParseError,
    SchemaError,
    ValidationError,
)
from lemps.synth import SynthSpec, generate


def make_record(year, month, prev=0.3, **overrides):
    fields = dict(
        key=MonthKey(year, month), number_screened=200,
        median_age_neg=25.0, median_age_pos=36.0,
        iqr_age_neg=48.0, iqr_age_pos=44.0,
        x_pd=15000.0, sd_pd=12000.0,
        mm_rf=120.0, mmP_rf=0.1,
        min_temp=22.0, max_temp=33.0, x_temp=27.5,
        prev=prev,
    )
    fields.update(overrides)
    return MonthlyRecord(**fields)


def make_dataset(start_year, start_month, n_months, prevs=None):
    key = MonthKey(start_year, start_month)
    records = []
    for i in range(n_months):
        prev = prevs[i] if prevs is not None else 0.2 + 0.001 * i
        records.append(make_record(key.year, key.month, prev=prev))
        key = key.successor()
    return Dataset(records)


class TestClinicalFormulas:
    def test_parasite_density(self):
        assert parasite_density(50, 200) == 2000.0
        assert parasite_density(0, 100) == 0.0
        assert parasite_density(8000, 8000) == 8000.0

    def test_parasite_density_zero_wbc(self):
        with pytest.raises(ZeroDivisionError):
            parasite_density(10, 0)
        with pytest.raises(ValueError):
            parasite_density(-1, 100)

    def test_prevalence_reference_years(self):
        # 1996: 627 positives of 2,295 screened; 2015: 551 of 3,091
        assert prevalence(627, 2295) == pytest.approx(0.2732026143790850, abs=1e-12)
        assert prevalence(551, 3091) == pytest.approx(0.1782594629569718, abs=1e-12)
        assert prevalence(0, 100) == 0.0

    def test_prevalence_domain(self):
        with pytest.raises(ZeroDivisionError):
            prevalence(0, 0)
        with pytest.raises(ValueError):
            prevalence(101, 100)
        with pytest.raises(ValueError):
            prevalence(-1, 100)

    def test_prevalence_always_in_unit_interval(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            screened = int(rng.integers(1, 5000))
            positives = int(rng.integers(0, screened + 1))
            assert 0.0 <= prevalence(positives, screened) <= 1.0


class TestMonthKey:
    def test_ordering_and_successor(self):
        assert MonthKey(1996, 12).successor() == MonthKey(1997, 1)
        assert MonthKey(1996, 1) < MonthKey(1996, 2) < MonthKey(1997, 1)

    def test_bounds(self):
        with pytest.raises(ValueError):
            MonthKey(1996, 13)
        with pytest.raises(ValueError):
            MonthKey(1996, 0)
        with pytest.raises(ValueError):
            MonthKey(1899, 5)

    def test_parse_round_trip(self):
        assert MonthKey.parse("2014-12") == MonthKey(2014, 12)
        assert str(MonthKey(2014, 3)) == "2014-03"
        with pytest.raises(ValueError):
            MonthKey.parse("2014/12")


class TestRecordInvariants:
    def test_zero_screened_rejected(self):
        with pytest.raises(ValueError, match="number_screened"):
            make_record(1996, 1, number_screened=0)

    def test_prev_bounds(self):
        with pytest.raises(ValueError, match="prev"):
            make_record(1996, 1, prev=1.2)

    def test_temperature_ordering(self):
        with pytest.raises(ValueError, match="temperatures"):
            make_record(1996, 1, min_temp=30.0, x_temp=25.0)

    def test_negative_fields(self):
        with pytest.raises(ValueError, match="mm_rf"):
            make_record(1996, 1, mm_rf=-1.0)
        with pytest.raises(ValueError, match="x_pd"):
            make_record(1996, 1, x_pd=-5.0)


class TestDatasetConstruction:
    def test_gap_detection(self):
        records = [make_record(1996, 1), make_record(1996, 2), make_record(1996, 4)]
        with pytest.raises(ContinuityError, match="1996-03"):
            Dataset(records)

    def test_duplicate_month(self):
        with pytest.raises(ContinuityError, match="duplicate"):
            Dataset([make_record(1996, 1), make_record(1996, 1)])

    def test_concat_requires_contiguity(self):
        a = make_dataset(1996, 1, 6)
        b = make_dataset(1996, 8, 4)
        with pytest.raises(ContinuityError):
            concat(a, b)
        c = make_dataset(1996, 7, 4)
        assert len(concat(a, c)) == 10


class TestCsv:
    def test_load_well_formed_year(self, tmp_path):
        path = tmp_path / "year.csv"
        write_csv(make_dataset(1996, 1, 12), path)
        data = load_csv(path)
        assert len(data) == 12
        assert data.first_key() == MonthKey(1996, 1)

    def test_round_trip_bytes(self, tmp_path):
        d = generate(SynthSpec(seed=3, n_years=2))
        p1 = tmp_path / "a.csv"
        p2 = tmp_path / "b.csv"
        write_csv(d, p1)
        write_csv(load_csv(p1), p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_unsorted_rows_are_sorted_before_validation(self, tmp_path):
        path = tmp_path / "u.csv"
        write_csv(make_dataset(1996, 1, 3), path)
        lines = path.read_text().splitlines()
        shuffled = [lines[0], lines[3], lines[1], lines[2]]
        path.write_text("\n".join(shuffled) + "\n")
        assert len(load_csv(path)) == 3

    def test_missing_column(self, tmp_path):
        path = tmp_path / "m.csv"
        write_csv(make_dataset(1996, 1, 3), path)
        text = path.read_text().replace("x_temp,", "")
        broken = "\n".join(line.rsplit(",", 2)[0] + "," + line.rsplit(",", 1)[1]
                           for line in text.splitlines())
        path.write_text(broken + "\n")
        with pytest.raises(SchemaError, match="x_temp"):
            load_csv(path)

    def test_extra_column(self, tmp_path):
        path = tmp_path / "e.csv"
        write_csv(make_dataset(1996, 1, 2), path)
        lines = path.read_text().splitlines()
        lines[0] += ",bogus"
        lines[1] += ",1"
        lines[2] += ",1"
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(SchemaError, match="bogus"):
            load_csv(path)

    def test_month_gap_error_names_gap(self, tmp_path):
        path = tmp_path / "g.csv"
        d = make_dataset(1996, 1, 4)
        write_csv(d, path)
        lines = path.read_text().splitlines()
        del lines[3]  # drop March
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(ContinuityError, match="1996-03"):
            load_csv(path)

    def test_invariant_violation_reports_row(self, tmp_path):
        path = tmp_path / "v.csv"
        write_csv(make_dataset(1996, 1, 3), path)
        lines = path.read_text().splitlines()
        cells = lines[2].split(",")
        cells[CSV_COLUMNS.index("prev")] = "1.2"
        lines[2] = ",".join(cells)
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(ValidationError, match="row 3"):
            load_csv(path)

    def test_unparseable_cell_reports_row_and_column(self, tmp_path):
        path = tmp_path / "p.csv"
        write_csv(make_dataset(1996, 1, 3), path)
        lines = path.read_text().splitlines()
        cells = lines[1].split(",")
        cells[CSV_COLUMNS.index("mm_rf")] = "wet"
        lines[1] = ",".join(cells)
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(ParseError, match="mm_rf"):
            load_csv(path)


class TestEncodeTask:
    def test_row_counts_and_widths(self, synth_dataset):
        train, _ = split_train_validation(synth_dataset, MonthKey(2014, 12))
        assert len(train) == 228
        for m, width in zip(range(1, 7), (15, 29, 43, 57, 71, 85)):
            task = encode_task(train, m)
            assert task.n_rows == 228 - m
            assert task.n_features == 14 * m
            assert task.n_features + 1 == width

    def test_single_window(self):
        d = make_dataset(1996, 1, 7, prevs=[0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7])
        task = encode_task(d, 6)
        assert task.n_rows == 1
        assert task.y[0] == 0.7
        assert task.instance_keys == (MonthKey(1996, 6),)

    def test_target_is_next_month_prev(self):
        d = make_dataset(2000, 1, 10, prevs=[i / 100 for i in range(1, 11)])
        task = encode_task(d, 2)
        for i, key in enumerate(task.instance_keys):
            record_next = d.get(key.successor())
            assert task.y[i] == record_next.prev

    def test_lag_blocks_bit_match_source_records(self, synth_dataset):
        train, _ = split_train_validation(synth_dataset, MonthKey(2014, 12))
        task = encode_task(train, 3)
        rng = np.random.default_rng(0)
        for i in rng.integers(0, task.n_rows, size=12):
            key = task.instance_keys[i]
            for k in range(3):
                rec = train.get(key.shifted(-k))
                block = task.X[i, 14 * k:14 * (k + 1)]
                assert tuple(block) == rec.feature_values()

    def test_horizon_source_adds_one_row(self):
        d = make_dataset(1996, 1, 12)
        horizon = make_dataset(1997, 1, 1, prevs=[0.42])
        base = encode_task(d, 2)
        extended = encode_task(d, 2, target_horizon_source=horizon)
        assert extended.n_rows == base.n_rows + 1
        assert extended.y[-1] == 0.42
        assert extended.instance_keys[-1] == MonthKey(1996, 12)

    def test_horizon_must_be_adjacent(self):
        d = make_dataset(1996, 1, 12)
        with pytest.raises(ContinuityError):
            encode_task(d, 1, target_horizon_source=make_dataset(1997, 2, 1))

    def test_parameter_errors(self):
        d = make_dataset(1996, 1, 12)
        with pytest.raises(ValueError):
            encode_task(d, 0)
        with pytest.raises(ValueError):
            encode_task(d, 7)
        with pytest.raises(InsufficientDataError):
            encode_task(make_dataset(1996, 1, 6), 6)

    def test_feature_order_lag0_first(self):
        d = make_dataset(1996, 1, 5)
        task = encode_task(d, 2)
        assert task.feature_names[0] == "month_lag0"
        assert task.feature_names[14] == "month_lag1"
        assert task.feature_names[13] == "prev_lag0"
        # lag-0 column holds the most recent month of each window
        assert task.X[0, 0] == 2.0  # February instance
        assert task.X[0, 14] == 1.0  # January is its lag-1 month


class TestSplit:
    def test_reference_cardinality(self, synth_dataset):
        train, valid = split_train_validation(synth_dataset, MonthKey(2014, 12))
        assert (len(train), len(valid)) == (228, 36)
        assert concat(train, valid).records == synth_dataset.records

    def test_small_split(self):
        d = make_dataset(1996, 1, 24)
        train, valid = split_train_validation(d, MonthKey(1996, 6))
        assert (len(train), len(valid)) == (6, 18)

    def test_boundary_range_errors(self):
        d = make_dataset(1996, 1, 24)
        with pytest.raises(ValueError):
            split_train_validation(d, MonthKey(1997, 12))  # last month
        with pytest.raises(ValueError):
            split_train_validation(d, MonthKey(1995, 12))
