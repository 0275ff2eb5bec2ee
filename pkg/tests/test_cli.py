import json
from pathlib import Path

import pandas as pd
import pytest

from src.cli import runner
from src.cli.config import CACHE_ENV, parse_config
from src.cli.plotdata import emit_plotdata, to_csv_text
from src.cli.records import config_digest, dumps_payload, make_record, dumps_record
from src.main import main
from src.models.entities import ComparisonReport, Relation
from src.utils.validators import ConfigError, SolverError
from tests.oracles import bessel_lambda, discrete_square

FIXTURES = Path(__file__).parent / "fixtures"

RADIAL_ARGS = ["radial", "--problem", "lambda", "--p", "2", "--n", "2", "--r1", "0.5", "--r2", "1"]


def _load(name):
    return json.loads((FIXTURES / name).read_text())


class TestParseConfig:
    def test_flags_fill_parameters(self):
        config = parse_config(RADIAL_ARGS)
        assert config.command == "radial"
        assert config.parameters["p"] == 2.0
        assert config.parameters["r1"] == 0.5
        # Schema defaults are filled in
        assert config.parameters["kappa"] == 0.0
        assert config.use_cache is True
        assert config.jobs == 1

    def test_flags_override_config_file(self, tmp_path):
        config_file = tmp_path / "run.json"
        config_file.write_text(json.dumps({
            "command": "radial",
            "parameters": {"p": 3, "r1": 0.2, "r2": 1.0},
            "jobs": 2,
        }))
        config = parse_config(["radial", "--config", str(config_file), "--p", "2"])
        assert config.parameters["p"] == 2.0
        assert config.parameters["r1"] == 0.2
        assert config.jobs == 2

    def test_unknown_file_key_is_named(self, tmp_path):
        config_file = tmp_path / "run.json"
        config_file.write_text(json.dumps({"command": "radial", "tolerance": 1e-6}))
        with pytest.raises(ConfigError) as excinfo:
            parse_config(["radial", "--config", str(config_file)])
        assert excinfo.value.key == "tolerance"
        assert "tolerance" in str(excinfo.value)

    def test_unknown_parameter_is_named(self, tmp_path):
        config_file = tmp_path / "run.json"
        config_file.write_text(json.dumps({"parameters": {"p": 2, "r1": 0.5, "r2": 1, "radius": 3}}))
        with pytest.raises(ConfigError) as excinfo:
            parse_config(["radial", "--config", str(config_file)])
        assert excinfo.value.key == "radius"

    def test_command_mismatch(self, tmp_path):
        config_file = tmp_path / "run.json"
        config_file.write_text(json.dumps({"command": "ball"}))
        with pytest.raises(ConfigError, match="ball"):
            parse_config(["radial", "--config", str(config_file)])

    def test_exponent_must_exceed_one(self):
        with pytest.raises(ConfigError, match="p must exceed 1"):
            parse_config(["radial", "--p", "1", "--r1", "0.5", "--r2", "1"])

    def test_annulus_radii_order(self):
        with pytest.raises(ConfigError, match="r1 must be below r2"):
            parse_config(["radial", "--p", "2", "--r1", "1", "--r2", "0.5"])

    def test_sphere_radius_limit(self):
        with pytest.raises(ConfigError, match="pi/sqrt"):
            parse_config(["ball", "--p", "2", "--kappa", "1", "--r", "3.5"])

    def test_bad_shape(self):
        with pytest.raises(ConfigError, match="unknown shape"):
            parse_config(["grid", "--shape", "triangle:1"])

    def test_cache_env_override(self, tmp_path, monkeypatch):
        monkeypatch.setenv(CACHE_ENV, str(tmp_path / "env-cache"))
        assert parse_config(RADIAL_ARGS).cache_dir == str(tmp_path / "env-cache")

        flagged = parse_config(RADIAL_ARGS + ["--cache-dir", str(tmp_path / "flag-cache")])
        assert flagged.cache_dir == str(tmp_path / "flag-cache")

    def test_plotdata_without_inputs(self):
        assert parse_config(["plotdata"]).parameters["inputs"] == []


class TestRecords:
    def test_digest_ignores_key_order(self):
        a = config_digest("radial", {"p": 2.0, "r1": 0.5, "r2": 1.0})
        b = config_digest("radial", {"r2": 1.0, "r1": 0.5, "p": 2.0})
        assert a == b
        assert len(a) == 64

    def test_digest_treats_ints_as_floats(self):
        assert config_digest("radial", {"p": 2, "n": 3}) == config_digest("radial", {"p": 2.0, "n": 3.0})

    def test_digest_depends_on_command_and_values(self):
        base = config_digest("radial", {"p": 2.0})
        assert config_digest("ball", {"p": 2.0}) != base
        assert config_digest("radial", {"p": 2.5}) != base

    def test_non_finite_values_become_null(self):
        text = dumps_payload({"eigenvalue": float("nan"), "slack": float("inf"), "p": 2.0})
        assert json.loads(text) == {"eigenvalue": None, "p": 2.0, "slack": None}

    def test_record_keys_sorted(self):
        text = dumps_record(make_record("radial", {"p": 2.0}, {"b": 1.0, "a": 2.0}))
        data = json.loads(text)
        assert list(data) == sorted(data)
        assert list(data["payload"]) == ["a", "b"]
        assert data["tool_version"]


class TestPlotdata:
    def test_fit_record_matches_golden(self):
        frame = emit_plotdata([_load("fit_record.json")])
        assert to_csv_text(frame) == (FIXTURES / "fit_plotdata.csv").read_text()

    def test_report_records_match_golden(self):
        record = _load("report_record.json")
        frame = emit_plotdata([record, record])
        assert to_csv_text(frame) == (FIXTURES / "report_plotdata.csv").read_text()

    def test_empty_input(self):
        assert to_csv_text(emit_plotdata([])) == "record\n"

    def test_mixed_kinds_rejected(self):
        with pytest.raises(ConfigError, match="mix"):
            emit_plotdata([_load("fit_record.json"), _load("report_record.json")])

    def test_command_exit_codes(self, tmp_path, cache_dir):
        out = tmp_path / "fit.csv"
        fit_file = str(FIXTURES / "fit_record.json")
        report_file = str(FIXTURES / "report_record.json")

        assert main(["plotdata", fit_file, "--output", str(out)]) == 0
        assert out.read_text() == (FIXTURES / "fit_plotdata.csv").read_text()

        assert main(["plotdata", fit_file, report_file, "--output", str(tmp_path / "mixed.csv")]) == 2
        assert main(["plotdata", str(tmp_path / "missing.json")]) == 2


class TestCommands:
    def test_radial_record_and_cache(self, tmp_path, cache_dir):
        first = tmp_path / "first.json"
        second = tmp_path / "second.json"
        args = RADIAL_ARGS + ["--cache-dir", str(cache_dir)]

        assert main(args + ["--output", str(first)]) == 0
        record = json.loads(first.read_text())
        assert record["command"] == "radial"
        assert record["payload"]["kind"] == "radial"
        assert record["payload"]["eigenvalue"] == pytest.approx(bessel_lambda(0.5, 1.0), rel=1e-6)
        assert len(list(cache_dir.glob("*.json"))) == 1

        # Cached re-run emits the identical bytes
        assert main(args + ["--output", str(second)]) == 0
        assert second.read_bytes() == first.read_bytes()

    def test_no_cache_skips_store(self, tmp_path, cache_dir):
        out = tmp_path / "ball.json"
        args = ["ball", "--p", "2", "--r", "1", "--cache-dir", str(cache_dir), "--no-cache", "-o", str(out)]
        assert main(args) == 0
        assert json.loads(out.read_text())["payload"]["eigenvalue"] > 0
        assert not cache_dir.exists()

    def test_grid_exports_bypass_cache(self, tmp_path, cache_dir):
        out = tmp_path / "grid.json"
        csv_path = tmp_path / "field.csv"
        pgm_path = tmp_path / "mask.pgm"
        args = [
            "grid", "--shape", "rectangle:1,1", "--h", "0.125",
            "--field-csv", str(csv_path), "--mask-pgm", str(pgm_path),
            "--cache-dir", str(cache_dir), "-o", str(out),
        ]
        assert main(args) == 0

        payload = json.loads(out.read_text())["payload"]
        assert payload["kind"] == "grid"
        assert payload["eigenvalue"] == pytest.approx(discrete_square(0.125), rel=1e-5)
        assert csv_path.exists()
        assert pgm_path.read_text().startswith("P2\n")
        assert not cache_dir.exists()

    def test_sweep_rows_in_order(self, tmp_path, cache_dir):
        out = tmp_path / "sweep.csv"
        args = [
            "sweep", "--kappa", "-1", "0", "0.5", "--p", "1.5", "2", "3",
            "--r1", "0.5", "--r2", "1", "-o", str(out),
        ]
        assert main(args) == 0

        frame = pd.read_csv(out)
        assert list(frame.columns) == runner.SWEEP_COLUMNS
        assert len(frame) == 9
        assert list(frame["kappa"]) == [-1.0] * 3 + [0.0] * 3 + [0.5] * 3
        assert list(frame["p"]) == [1.5, 2.0, 3.0] * 3
        assert (frame["eigenvalue"] > 0).all()
        # Sweeps are never cached
        assert not cache_dir.exists()

        flat_p2 = frame[(frame["kappa"] == 0.0) & (frame["p"] == 2.0)]["eigenvalue"].iloc[0]
        assert flat_p2 == pytest.approx(bessel_lambda(0.5, 1.0), rel=1e-6)

    @pytest.mark.slow
    def test_sweep_workers_match_serial(self, tmp_path):
        axes = ["sweep", "--kappa", "0", "1", "--p", "2", "--r1", "0.4", "--r2", "1"]
        serial, parallel = tmp_path / "serial.csv", tmp_path / "parallel.csv"
        assert main(axes + ["-o", str(serial)]) == 0
        assert main(axes + ["--jobs", "2", "-o", str(parallel)]) == 0

        a = pd.read_csv(serial).drop(columns=["wall_ms"])
        b = pd.read_csv(parallel).drop(columns=["wall_ms"])
        pd.testing.assert_frame_equal(a, b)

    def test_verify_sign_structure_passes(self, tmp_path, cache_dir):
        out = tmp_path / "check.json"
        args = [
            "verify", "sign-structure", "--p", "3", "--kappa", "0.5", "--r1", "0.3", "--r2", "1",
            "--cache-dir", str(cache_dir), "-o", str(out),
        ]
        assert main(args) == 0
        payload = json.loads(out.read_text())["payload"]
        assert payload["kind"] == "check"
        assert payload["passed"] is True
        assert payload["fit"] is None

    def test_failed_check_exits_one(self, tmp_path, cache_dir, monkeypatch):
        def failing(result):
            return ComparisonReport.compare(0.5, 1.0, Relation.EQ, 0.0, "forced", theorem="sign-structure")

        monkeypatch.setattr(runner, "check_sign_structure", failing)
        out = tmp_path / "check.json"
        args = ["verify", "sign-structure", "--cache-dir", str(cache_dir), "--no-cache", "-o", str(out)]
        assert main(args) == 1

        # The record is still written
        payload = json.loads(out.read_text())["payload"]
        assert payload["passed"] is False
        assert payload["reports"][0]["provenance"] == "forced"

    def test_expected_failure_exits_zero(self, tmp_path, cache_dir, monkeypatch):
        def violated(result):
            return ComparisonReport.compare(
                0.8, 1.0, Relation.GE, 0.02, "off-center hole", theorem="faber-krahn", expected=False
            )

        monkeypatch.setattr(runner, "check_sign_structure", violated)
        out = tmp_path / "check.json"
        args = ["verify", "sign-structure", "--cache-dir", str(cache_dir), "--no-cache", "-o", str(out)]
        assert main(args) == 0

        report = json.loads(out.read_text())["payload"]["reports"][0]
        assert report["passed"] is False
        assert report["expected"] is False
        assert report["as_expected"] is True
        assert report["slack"] == pytest.approx(-0.2)

    def test_solver_failure_exits_three(self, tmp_path, monkeypatch):
        def broken(*args, **kwargs):
            raise SolverError("no sign change", diagnostics={"boundary_value": 1.0})

        monkeypatch.setattr(runner, "solve_annulus", broken)
        assert main(RADIAL_ARGS + ["--no-cache", "-o", str(tmp_path / "out.json")]) == 3
        assert not (tmp_path / "out.json").exists()

    def test_invalid_config_exits_two(self, tmp_path):
        assert main(["radial", "--p", "0.5", "--r1", "0.5", "--r2", "1"]) == 2
        assert main(["verify", "no-such-check"]) == 2
        assert main([]) == 2

    def test_invalid_check_input_exits_two(self, tmp_path, cache_dir):
        # Curvature ladder must be increasing
        args = ["verify", "curvature", "--kappas", "0.5", "0", "--cache-dir", str(cache_dir), "--no-cache"]
        assert main(args) == 2
