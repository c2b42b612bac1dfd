import csv
import json
import os
import subprocess
import sys

import pytest
from mpmath import mpf

from turanlab import SweepConfig, run_sweep, emit_csv, emit_json
from turanlab.sweep import CSV_HEADER, report_json_dict
from turanlab.precision import PrecisionContext


def run_cli(args, env_extra=None, cwd=None):
    env = dict(os.environ)
    if env_extra:
        env.update(env_extra)
    return subprocess.run(
        [sys.executable, "-m", "turanlab.cli", *args],
        capture_output=True, text=True, env=env, cwd=cwd,
    )


@pytest.fixture(scope="module")
def small_report(tmp_path_factory):
    d = tmp_path_factory.mktemp("sweep")
    cfg = SweepConfig(
        n_values=[12], k_values=[1], theorems=["2.1"],
        out_csv=str(d / "s.csv"), out_json=str(d / "s.json"),
    )
    return cfg, run_sweep(cfg)


class TestRunSweep:
    def test_single_cell(self, small_report):
        cfg, rep = small_report
        assert len(rep.rows) == 1 and not rep.skipped
        row = rep.rows[0]
        assert row.passed
        assert abs(row.value_upper - 13) <= 1e-7 * 13
        assert row.theorem_lower == 1

    def test_constants_attached(self, small_report):
        _, rep = small_report
        est = rep.constants
        assert est is not None
        assert est.c1_endpoint_hat >= mpf(1) / 12
        assert est.c4_hat > 0 and est.c5_hat > 0 and est.c3_hat > 0

    def test_metadata(self, small_report):
        _, rep = small_report
        assert rep.metadata["bits"] == 256
        assert rep.metadata["seed"] == 0x5EED
        assert "wall_time_s" in rep.metadata

    def test_feasibility_skip(self, tmp_path):
        cfg = SweepConfig(n_values=[2], k_values=[6], theorems=["2.1"],
                          out_csv=str(tmp_path / "x.csv"),
                          out_json=str(tmp_path / "x.json"))
        rep = run_sweep(cfg)
        assert not rep.rows
        assert rep.skipped == [
            {"n": 2, "k": 6, "theorem": "2.1", "reason": "variation guard: k > n"}
        ]

    def test_invalid_config(self):
        with pytest.raises(ValueError):
            SweepConfig(n_values=[], k_values=[1])
        with pytest.raises(ValueError):
            SweepConfig(n_values=[1], k_values=[0])
        with pytest.raises(ValueError):
            SweepConfig(n_values=[1], k_values=[1], theorems=["3.7"])

    def test_parallel_matches_serial(self, tmp_path):
        texts = []
        for jobs, name in ((1, "ser"), (2, "par")):
            cfg = SweepConfig(n_values=[12, 16], k_values=[1], theorems=["2.1"],
                              jobs=jobs,
                              out_csv=str(tmp_path / (name + ".csv")),
                              out_json="")
            run_sweep(cfg)
            texts.append(open(tmp_path / (name + ".csv"), "rb").read())
        assert texts[0] == texts[1]


class TestEmission:
    def test_csv_two_lines_and_header(self, small_report, tmp_path):
        cfg, rep = small_report
        data = open(cfg.out_csv, "r", encoding="utf-8").read()
        lines = data.splitlines()
        assert lines[0] == CSV_HEADER
        assert len(lines) == 2
        assert "\r" not in data

    def test_reemission_byte_identical(self, small_report, tmp_path):
        _, rep = small_report
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        emit_csv(rep, str(p1))
        emit_csv(rep, str(p2))
        assert open(p1, "rb").read() == open(p2, "rb").read()

    def test_csv_parses_round_trip(self, small_report):
        cfg, _ = small_report
        with open(cfg.out_csv, newline="", encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 1
        r = rows[0]
        assert r["n"] == "12" and r["k"] == "1" and r["theorem"] == "2.1"
        assert r["pass"] == "true"
        assert abs(float(r["value_upper"]) - 13.0) < 1e-6
        assert float(r["gap"]) <= 1e-6

    def test_json_schema(self, small_report):
        cfg, rep = small_report
        payload = json.load(open(cfg.out_json, encoding="utf-8"))
        assert set(payload) == {"rows", "skipped", "constants", "metadata"}
        row = payload["rows"][0]
        for key in ("theorem_lower", "value_lower", "value_upper", "gap",
                    "witness_ratio"):
            assert isinstance(row[key], str)
        assert row["pass"] is True


class TestCli:
    def test_muntz_json(self, tmp_path):
        res = run_cli(["muntz", "--nu", "0", "--kappa", "2", "--bits", "128"])
        assert res.returncode == 0
        payload = json.loads(res.stdout)
        assert set(payload) == {"nu", "kappa", "coeffs", "alternation_points",
                                "zeros", "residual", "t2_integral"}
        assert abs(float(payload["t2_integral"]) - 7 / 15) < 1e-12

    def test_ratio_endpoint(self):
        res = run_cli(["ratio", "--n", "12", "--k", "1", "--bits", "128"])
        assert res.returncode == 0
        payload = json.loads(res.stdout)
        assert abs(float(payload["value_upper"]) - 13) < 1e-6

    def test_sweep_skip_exit_zero(self, tmp_path):
        res = run_cli(["sweep", "--n", "2", "--k", "6", "--theorems", "2.1",
                       "--out", str(tmp_path / "sk")])
        assert res.returncode == 0
        summary = json.loads(res.stdout)
        assert summary["rows"] == 0
        assert "variation guard" in summary["skipped"][0]["reason"]

    def test_verify_lemmas_small(self):
        res = run_cli(["verify-lemmas", "--lemma", "3.1", "--trials", "8",
                       "--bits", "128"])
        assert res.returncode == 0
        payload = json.loads(res.stdout)
        rep = payload["reports"][0]
        assert rep["lemma"] == "3.1" and rep["pass"] is True
        assert float(rep["worst_margin"]) <= 1 + 1e-10

    def test_usage_error_exit_3(self):
        res = run_cli(["ratio", "--n", "12"])  # missing --k
        assert res.returncode == 3
        res = run_cli(["frobnicate"])
        assert res.returncode == 3

    def test_env_var_bits(self, tmp_path):
        res = run_cli(["muntz", "--nu", "0", "--kappa", "2"],
                      env_extra={"TURANLAB_BITS": "96"})
        assert res.returncode == 0
        payload = json.loads(res.stdout)
        # 96-bit context prints about 30 digits, far fewer than 256-bit
        assert len(payload["zeros"][0]) < 45

    def test_flag_beats_env(self):
        res = run_cli(["muntz", "--nu", "0", "--kappa", "2", "--bits", "256"],
                      env_extra={"TURANLAB_BITS": "96"})
        payload = json.loads(res.stdout)
        assert len(payload["zeros"][0]) > 60

    def test_config_file_and_flag_override(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("nu=0\nkappa=2\nbits=128\n")
        res = run_cli(["muntz", "--config", str(cfg)])
        assert res.returncode == 0
        payload = json.loads(res.stdout)
        assert payload["kappa"] == 2
        res2 = run_cli(["muntz", "--config", str(cfg), "--kappa", "1"])
        payload2 = json.loads(res2.stdout)
        assert payload2["kappa"] == 1

    def test_estimate_constants_small(self):
        res = run_cli(["estimate-constants", "--n", "12", "--k", "1",
                       "--theorems", "2.1", "--trials", "3"])
        assert res.returncode == 0
        payload = json.loads(res.stdout)
        consts = payload["constants"]
        assert float(consts["c1_endpoint_hat"]) >= 1 / 12
        assert float(consts["c5_hat"]) > 0
