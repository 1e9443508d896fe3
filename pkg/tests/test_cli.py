import json

import pytest
from click.testing import CliRunner

from lemps.cli import main
from lemps.dataset import load_csv
from lemps.serialize import dumps


@pytest.fixture()
def runner():
    return CliRunner()


@pytest.fixture()
def spec_file(tmp_path):
    path = tmp_path / "spec.json"
    path.write_text(json.dumps({
        "seed": 11, "n_years": 8, "start_year": 2000,
        "base_prevalence": 0.3, "seasonal_amplitude": 0.1,
        "trend_per_year": -0.005, "noise_sd": 0.02, "mean_screened": 300,
    }))
    return path


@pytest.fixture()
def data_csv(runner, spec_file, tmp_path):
    out = tmp_path / "data.csv"
    result = runner.invoke(main, ["synth", "--config", str(spec_file),
                                  "--out", str(out)])
    assert result.exit_code == 0, result.output
    return out


class TestSynthCommand:
    def test_writes_valid_csv_and_manifest(self, runner, spec_file, tmp_path):
        out = tmp_path / "d.csv"
        result = runner.invoke(main, ["synth", "--config", str(spec_file),
                                      "--out", str(out)])
        assert result.exit_code == 0
        data = load_csv(out)
        assert len(data) == 96
        manifest = json.loads((tmp_path / "d.csv.manifest.json").read_text())
        assert manifest["command"] == "synth"
        assert manifest["seed"] == 11

    def test_malformed_spec_names_field(self, runner, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"n_years": 3, "mean_screened": 2}))
        result = runner.invoke(main, ["synth", "--config", str(bad),
                                      "--out", str(tmp_path / "x.csv")])
        assert result.exit_code == 2
        assert "mean_screened" in result.output

    def test_unknown_field_rejected(self, runner, tmp_path):
        bad = tmp_path / "bad2.json"
        bad.write_text(json.dumps({"n_years": 3, "sparkle": 1}))
        result = runner.invoke(main, ["synth", "--config", str(bad),
                                      "--out", str(tmp_path / "x.csv")])
        assert result.exit_code == 2
        assert "sparkle" in result.output

    def test_same_spec_identical_bytes(self, runner, spec_file, tmp_path):
        outs = []
        for name in ("a.csv", "b.csv"):
            out = tmp_path / name
            assert runner.invoke(main, ["synth", "--config", str(spec_file),
                                        "--out", str(out)]).exit_code == 0
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]

    def test_seed_override_recorded(self, runner, spec_file, tmp_path):
        out = tmp_path / "c.csv"
        result = runner.invoke(main, ["synth", "--config", str(spec_file),
                                      "--out", str(out), "--seed", "99"])
        assert result.exit_code == 0
        manifest = json.loads((tmp_path / "c.csv.manifest.json").read_text())
        assert manifest["overrides"] == {"seed": 99}
        assert manifest["seed"] == 99


class TestSelectCommand:
    def test_single_cell(self, runner, data_csv, tmp_path):
        out = tmp_path / "sel.json"
        result = runner.invoke(main, [
            "select", "--data", str(data_csv), "--boundary", "2005-12",
            "--tasks", "1", "--estimators", "EN", "--repeats", "2",
            "--seed", "3", "--out", str(out)])
        assert result.exit_code == 0, result.output
        doc = json.loads(out.read_text())
        assert len(doc["reports"]) == 1
        rep = doc["reports"][0]
        assert rep["estimator"] == "EN"
        assert rep["n_repeats"] == 2
        assert all(r["chosen_params"]["l1_ratio"] == 0.5 for r in rep["fit_reports"])

    def test_unknown_estimator_exit_2_lists_names(self, runner, data_csv, tmp_path):
        result = runner.invoke(main, [
            "select", "--data", str(data_csv), "--boundary", "2005-12",
            "--estimators", "EN,POLYNOMIAL", "--repeats", "1",
            "--out", str(tmp_path / "x.json")])
        assert result.exit_code == 2
        assert "POLYNOMIAL" in result.output
        assert "LASSO-LARS-AIC" in result.output

    def test_dataset_too_short_for_task(self, spec_file, tmp_path):
        short_spec = tmp_path / "short.json"
        short_spec.write_text(json.dumps({"seed": 1, "n_years": 1, "start_year": 2000}))
        short_csv = tmp_path / "short.csv"
        r = CliRunner().invoke(main, ["synth", "--config", str(short_spec),
                                      "--out", str(short_csv)])
        assert r.exit_code == 0
        result = CliRunner().invoke(main, [
            "select", "--data", str(short_csv), "--boundary", "2000-06",
            "--tasks", "6", "--estimators", "EN", "--repeats", "1",
            "--out", str(tmp_path / "x.json")])
        assert result.exit_code == 2
        assert "lemps: error" in result.output


class TestTuneEnCommand:
    def test_emits_one_summary_per_task(self, runner, data_csv, tmp_path):
        out = tmp_path / "tune.json"
        result = runner.invoke(main, [
            "tune-en", "--data", str(data_csv), "--boundary", "2005-12",
            "--tasks", "1,2", "--repeats", "2", "--seed", "1", "--out", str(out)])
        assert result.exit_code == 0, result.output
        doc = json.loads(out.read_text())
        assert [r["task"] for r in doc["reports"]] == [1, 2]
        for rep in doc["reports"]:
            assert rep["alpha_mean"] is not None
            assert rep["l1ratio_median"] is not None
            assert len(rep["heldout_pred_mean"]) == len(rep["instance_truths"])

    def test_single_repeat_zero_spread(self, runner, data_csv, tmp_path):
        out = tmp_path / "tune1.json"
        result = runner.invoke(main, [
            "tune-en", "--data", str(data_csv), "--boundary", "2005-12",
            "--tasks", "1", "--repeats", "1", "--seed", "1", "--out", str(out)])
        assert result.exit_code == 0
        rep = json.loads(out.read_text())["reports"][0]
        assert rep["alpha_sd"] == 0.0
        assert rep["l1ratio_iqr"] == 0.0


class TestValidateCommand:
    def test_structure_and_outputs(self, runner, data_csv, tmp_path):
        config = tmp_path / "config.json"
        config.write_text(json.dumps({
            "tasks": {str(m): {"alpha": 0.005, "l1_ratio": 0.5}
                      for m in range(1, 7)}}))
        out = tmp_path / "report.json"
        result = runner.invoke(main, [
            "validate", "--data", str(data_csv), "--boundary", "2005-12",
            "--config", str(config), "--out", str(out)])
        assert result.exit_code == 0, result.output
        doc = json.loads(out.read_text())["report"]
        assert len(doc["tasks"]) == 6
        assert 0.0 <= doc["overall_in_band_fraction"] <= 1.0
        csv_text = (tmp_path / "report.csv").read_text().splitlines()
        assert csv_text[0] == "task,year,month,y_true,y_pred,in_band,season,novelty"

    def test_missing_task_in_config(self, runner, data_csv, tmp_path):
        config = tmp_path / "partial.json"
        config.write_text(json.dumps({
            "tasks": {"1": {"alpha": 0.005, "l1_ratio": 0.5}}}))
        result = runner.invoke(main, [
            "validate", "--data", str(data_csv), "--boundary", "2005-12",
            "--config", str(config), "--out", str(tmp_path / "x.json")])
        assert result.exit_code == 2
        assert "missing task" in result.output

    def test_shock_month_surfaces_in_novelty_flags(self, runner, tmp_path):
        spec = tmp_path / "shock_spec.json"
        spec.write_text(json.dumps({
            "seed": 3, "n_years": 22, "start_year": 1996,
            "base_prevalence": 0.3, "seasonal_amplitude": 0.1,
            "trend_per_year": -0.005, "noise_sd": 0.02, "mean_screened": 400,
            "shock_months": [{"year": 2016, "month": 9,
                              "screening_multiplier": 0.25,
                              "prevalence_delta": -0.2}],
        }))
        data = tmp_path / "shock.csv"
        assert runner.invoke(main, ["synth", "--config", str(spec),
                                    "--out", str(data)]).exit_code == 0
        config = tmp_path / "cfg.json"
        config.write_text(json.dumps({
            "tasks": {str(m): {"alpha": 0.01, "l1_ratio": 0.5}
                      for m in range(1, 7)}}))
        out = tmp_path / "shock_report.json"
        result = runner.invoke(main, [
            "validate", "--data", str(data), "--boundary", "2014-12",
            "--config", str(config), "--out", str(out)])
        assert result.exit_code == 0, result.output
        doc = json.loads(out.read_text())["report"]
        flagged = {entry["month"] for entry in doc["novelty_flagged"]}
        assert "2016-09" in flagged

    def test_accepts_tuning_output_as_config(self, runner, data_csv, tmp_path):
        tune_out = tmp_path / "tune.json"
        result = runner.invoke(main, [
            "tune-en", "--data", str(data_csv), "--boundary", "2005-12",
            "--tasks", "1-6", "--repeats", "1", "--seed", "1",
            "--out", str(tune_out)])
        assert result.exit_code == 0, result.output
        out = tmp_path / "rep.json"
        result = runner.invoke(main, [
            "validate", "--data", str(data_csv), "--boundary", "2005-12",
            "--config", str(tune_out), "--out", str(out)])
        assert result.exit_code == 0, result.output


class TestDeterminism:
    def test_select_reruns_byte_identical(self, runner, data_csv, tmp_path):
        blobs = []
        for name in ("r1.json", "r2.json"):
            out = tmp_path / name
            result = runner.invoke(main, [
                "select", "--data", str(data_csv), "--boundary", "2005-12",
                "--tasks", "1", "--estimators", "RR,LASSO-LARS-AIC",
                "--repeats", "3", "--seed", "7", "--out", str(out)])
            assert result.exit_code == 0, result.output
            blobs.append(out.read_bytes())
        assert blobs[0] == blobs[1]

    def test_thread_cap_does_not_change_bytes(self, runner, data_csv, tmp_path, monkeypatch):
        blobs = []
        for threads, name in (("1", "t1.json"), ("2", "t2.json")):
            monkeypatch.setenv("LEMPS_THREADS", threads)
            out = tmp_path / name
            result = runner.invoke(main, [
                "tune-en", "--data", str(data_csv), "--boundary", "2005-12",
                "--tasks", "1", "--repeats", "2", "--seed", "5",
                "--out", str(out)])
            assert result.exit_code == 0, result.output
            blobs.append(out.read_bytes())
        assert blobs[0] == blobs[1]


class TestSerializer:
    def test_fixed_float_format(self):
        assert dumps({"x": 0.1}) == '{"x":0.10000000000000001}'
        assert dumps([1, True, None, "s"]) == '[1,true,null,"s"]'
        assert dumps({"b": 1, "a": 2}) == '{"a":2,"b":1}'
