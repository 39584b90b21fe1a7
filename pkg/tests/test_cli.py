import json
import math

import numpy as np
import pytest

from smallslice import cli


def run(argv):
    return cli.main(argv)


def load(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def strip_timing(payload):
    payload = dict(payload)
    payload.pop("wall_times", None)
    return payload


VERIFY_ARGS = ["verify-lemmas", "--n", "5", "--k", "2", "--trials", "20000", "--seed", "1"]
BUILD_ARGS = ["build", "--n", "4", "--k", "1", "--points", "64", "--trials", "10000",
              "--restarts", "2", "--steps", "60", "--seed", "5"]


class TestVerifyLemmas:
    def test_passes_and_reports(self, tmp_path):
        out = tmp_path / "checks.json"
        assert run(VERIFY_ARGS + ["--out", str(out)]) == 0
        payload = load(out)
        assert payload["all_passed"] is True
        names = {c["name"] for c in payload["checks"]}
        assert {"gamma_margin_random", "expectation_bound_grid",
                "bispherical_surface_identity", "chernoff_bernoulli",
                "gaussian_tail_grid", "lipschitz_triples"} <= names
        assert payload["schema_version"] == "1"
        assert "build_id" in payload and "master_seed" in payload

    def test_corrupted_tolerance_fails(self, tmp_path):
        out = tmp_path / "checks.json"
        code = run(VERIFY_ARGS + ["--corrupt-tolerances", "--out", str(out)])
        assert code == 1
        payload = load(out)
        failing = [c["name"] for c in payload["checks"] if not c["passed"]]
        assert failing == ["expectation_bound_grid"]

    def test_deterministic(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        run(VERIFY_ARGS + ["--out", str(a)])
        run(VERIFY_ARGS + ["--out", str(b)])
        assert strip_timing(load(a)) == strip_timing(load(b))

    def test_grid_ceiling(self, tmp_path):
        assert run(["verify-lemmas", "--n", "40", "--out", str(tmp_path / "x.json")]) == 2


class TestBuild:
    def test_report_and_exit(self, tmp_path):
        out = tmp_path / "report.json"
        assert run(BUILD_ARGS + ["--out", str(out)]) == 0
        payload = load(out)
        assert payload["schema_version"] == "1"
        assert payload["mass_3k0"]["estimate"] >= 0.75 - 3 * payload["mass_3k0"]["std_error"]
        assert payload["sup_over_net"] <= payload["target_threshold"]
        assert payload["max_section"] > 0
        assert payload["params"]["n"] == 4

    def test_usage_error_on_k_equal_n(self, capsys):
        assert run(["build", "--n", "4", "--k", "4"]) == 2
        assert "usage error" in capsys.readouterr().err

    def test_ceiling_error(self):
        assert run(["build", "--n", "16", "--k", "1"]) == 2

    def test_deterministic(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        run(BUILD_ARGS + ["--out", str(a)])
        run(BUILD_ARGS + ["--out", str(b)])
        assert strip_timing(load(a)) == strip_timing(load(b))

    def test_config_file_with_flag_override(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"n": 4, "k": 1, "points": 64, "trials": 10000,
                                   "restarts": 2, "steps": 60, "seed": 5}))
        out_cfg = tmp_path / "from_cfg.json"
        assert run(["build", "--config", str(cfg), "--out", str(out_cfg)]) == 0
        payload = load(out_cfg)
        assert payload["params"]["N"] == 64
        # a flag overrides the file value
        out_flag = tmp_path / "override.json"
        assert run(["build", "--config", str(cfg), "--points", "32",
                    "--out", str(out_flag)]) == 0
        assert load(out_flag)["params"]["N"] == 32


class TestSweep:
    SWEEP_ARGS = ["sweep", "--n-grid", "4,5", "--k-grid", "1", "--points", "48",
                  "--trials", "10000", "--restarts", "2", "--steps", "50",
                  "--seed", "2"]

    def test_csv_shape(self, tmp_path):
        out = tmp_path / "sweep.csv"
        assert run(self.SWEEP_ARGS + ["--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        header_rows = [ln for ln in lines if ln.startswith("#")]
        data = [ln for ln in lines if not ln.startswith("#")]
        assert any("schema_version" in h for h in header_rows)
        assert data[0].split(",") == list(cli.SWEEP_COLUMNS)
        assert len(data) == 1 + 2  # header + one row per grid cell
        for row in data[1:]:
            assert row.split(",")[-1] == "ok"

    def test_rerun_identical_bytes(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        run(self.SWEEP_ARGS + ["--out", str(a)])
        run(self.SWEEP_ARGS + ["--out", str(b)])
        assert a.read_bytes() == b.read_bytes()

    def test_json_format(self, tmp_path):
        out = tmp_path / "sweep.json"
        assert run(self.SWEEP_ARGS + ["--format", "json", "--out", str(out)]) == 0
        payload = load(out)
        assert len(payload["rows"]) == 2

    def test_bad_format(self):
        # argparse rejects the choice itself and exits with the usage code
        with pytest.raises(SystemExit) as exc:
            run(self.SWEEP_ARGS + ["--format", "xml"])
        assert exc.value.code == 2


class TestSearch:
    def test_search_on_saved_report(self, tmp_path):
        report = tmp_path / "report.json"
        run(BUILD_ARGS + ["--out", str(report)])
        out = tmp_path / "search.json"
        assert run(["search", "--report", str(report), "--seed", "9",
                    "--restarts", "3", "--steps", "80", "--out", str(out)]) == 0
        payload = load(out)
        saved = load(report)
        assert payload["max_section"] > 0
        assert payload["saved_max_section"] == saved["max_section"]
        # certificates agree through the same closed form
        assert payload["dovr_lower_modulo_c"] == pytest.approx(
            payload["max_section"] ** (-1.0 / saved["params"]["k"])
        )

    def test_missing_report_is_usage_error(self, tmp_path):
        assert run(["search", "--report", str(tmp_path / "nope.json")]) == 2
