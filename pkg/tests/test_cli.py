"""End-to-end command-line behavior, including the bundled scenarios."""

from __future__ import annotations

import json
import math
from pathlib import Path

import pytest

from bellsim.cli import main

SCENARIOS = Path(__file__).resolve().parents[1] / "scenarios"
BUNDLED = sorted(SCENARIOS.glob("*.scenario"))

TSIRELSON = ["0", "1.5707963267948966", "0.7853981633974483",
             "-0.7853981633974483"]


def run_cli(capsys, *argv) -> tuple[int, str, str]:
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestRun:
    def test_bundled_files_exist(self):
        names = {p.name for p in BUNDLED}
        assert names == {"factorized.scenario", "joint-composite.scenario",
                         "singlet-witness.scenario",
                         "stochastic-equivalent.scenario"}

    @pytest.mark.parametrize("path", BUNDLED, ids=lambda p: p.stem)
    def test_bundled_scenarios_run_clean(self, capsys, path):
        code, out, err = run_cli(capsys, "run", str(path))
        assert code == 0
        assert err == ""
        doc = json.loads(out)
        assert doc["scenario_digest"].startswith("sha256:")
        assert "chsh" in doc["analyses"]

    @pytest.mark.parametrize("path", BUNDLED, ids=lambda p: p.stem)
    def test_reports_byte_identical(self, capsys, path):
        _, once, _ = run_cli(capsys, "run", str(path))
        _, again, _ = run_cli(capsys, "run", str(path))
        assert once == again

    def test_factorized_report_content(self, capsys):
        code, out, _ = run_cli(capsys, "run",
                               str(SCENARIOS / "factorized.scenario"))
        assert code == 0
        doc = json.loads(out)
        assert abs(doc["analyses"]["chsh"]["s"]) <= 2.0 + 1e-9
        assert doc["analyses"]["bell-check"]["verdict"] == "Satisfied"
        assert doc["analyses"]["feasibility"]["status"] == "Feasible"

    def test_witness_report_content(self, capsys):
        code, out, _ = run_cli(capsys, "run",
                               str(SCENARIOS / "singlet-witness.scenario"))
        assert code == 0
        doc = json.loads(out)
        assert doc["analyses"]["chsh"]["s"] == pytest.approx(-2 * math.sqrt(2),
                                                             abs=1e-9)
        assert doc["analyses"]["bell-check"]["verdict"] == "Violated"
        feas = doc["analyses"]["feasibility"]
        assert feas["status"] == "Infeasible"
        assert feas["classification"] == "Nonlocal"
        assert feas["certificate_check"]["y_transpose_b"] > 1e-9
        assert feas["certificate_check"]["max_y_transpose_A"] <= 1e-7

    def test_stochastic_equivalent_report_content(self, capsys):
        code, out, _ = run_cli(
            capsys, "run", str(SCENARIOS / "stochastic-equivalent.scenario"))
        assert code == 0
        emu = json.loads(out)["analyses"]["emulation"]
        assert emu["comparison_kind"] == "StochasticSource"
        assert emu["max_effective_response_gap"] <= 1e-12
        assert all(p["gap"] <= 1e-12 for p in emu["pairs"])

    def test_output_flag_writes_file(self, capsys, tmp_path):
        out_path = tmp_path / "report.json"
        code, out, _ = run_cli(capsys, "run",
                               str(SCENARIOS / "factorized.scenario"),
                               "-o", str(out_path))
        assert code == 0
        assert out == ""
        json.loads(out_path.read_text(encoding="utf-8"))

    def test_output_dir_env_var(self, capsys, tmp_path, monkeypatch):
        monkeypatch.setenv("BELLSIM_OUTPUT_DIR", str(tmp_path))
        code, _, _ = run_cli(capsys, "run",
                             str(SCENARIOS / "factorized.scenario"),
                             "-o", "nested/report.json")
        assert code == 0
        assert (tmp_path / "nested" / "report.json").is_file()

    def test_absolute_output_ignores_env_var(self, capsys, tmp_path, monkeypatch):
        monkeypatch.setenv("BELLSIM_OUTPUT_DIR", str(tmp_path / "elsewhere"))
        target = tmp_path / "direct.json"
        code, _, _ = run_cli(capsys, "run",
                             str(SCENARIOS / "factorized.scenario"),
                             "-o", str(target))
        assert code == 0
        assert target.is_file()

    def test_seed_override_changes_stream(self, capsys):
        path = str(SCENARIOS / "joint-composite.scenario")
        _, base, _ = run_cli(capsys, "run", path)
        _, overridden, _ = run_cli(capsys, "run", path, "--seed", "99")
        assert base != overridden
        assert json.loads(overridden)["analyses"]["correlations"][
            "estimator"]["seed"] == 99
        _, overridden_again, _ = run_cli(capsys, "run", path, "--seed", "99")
        assert overridden == overridden_again

    def test_negative_weight_exit_and_message(self, capsys, tmp_path):
        doc = json.loads((SCENARIOS / "singlet-witness.scenario").read_text())
        doc["distributions"]["marginals"]["a|b"]["weights"][0] = -0.25
        bad = tmp_path / "bad.scenario"
        bad.write_text(json.dumps(doc), encoding="utf-8")
        code, out, err = run_cli(capsys, "run", str(bad))
        assert code == 1
        assert out == ""
        assert "hv-core" in err
        assert "NegativeWeight" in err

    def test_missing_file_exit(self, capsys, tmp_path):
        code, _, err = run_cli(capsys, "run", str(tmp_path / "nope.scenario"))
        assert code == 1
        assert "cannot read" in err

    def test_work_limit_exit(self, capsys):
        code, _, err = run_cli(capsys, "run",
                               str(SCENARIOS / "factorized.scenario"),
                               "--work-limit", "4")
        assert code == 1
        assert "work limit" in err.lower() or "limit" in err.lower()


class TestGenerate:
    def test_generate_then_run(self, capsys, tmp_path):
        out = tmp_path / "gen.scenario"
        code, _, _ = run_cli(capsys, "generate", "factorized",
                             "--seed", "5", "-o", str(out))
        assert code == 0
        code, text, _ = run_cli(capsys, "run", str(out))
        assert code == 0
        assert json.loads(text)["analyses"]["feasibility"]["status"] == "Feasible"

    def test_generate_to_stdout(self, capsys):
        code, out, _ = run_cli(capsys, "generate", "setting-dependent-witness")
        assert code == 0
        doc = json.loads(out)
        assert doc["schema_version"] == 1
        assert doc["distributions"]["mode"] == "SettingDependent"

    def test_generate_with_flags(self, capsys, tmp_path):
        out = tmp_path / "mc.scenario"
        code, _, _ = run_cli(capsys, "generate", "joint-composite",
                             "--seed", "3", "--cards", "2,2,2,2,2",
                             "--estimator", "monte-carlo", "--samples", "1000",
                             "--mc-seed", "12", "-o", str(out))
        assert code == 0
        doc = json.loads(out.read_text(encoding="utf-8"))
        assert doc["run"]["estimator"] == {"method": "monte-carlo",
                                           "samples": 1000, "seed": 12}

    def test_unknown_template_exit(self, capsys):
        code, _, err = run_cli(capsys, "generate", "foo")
        assert code == 1
        assert "unknown template" in err

    def test_bad_angles_exit(self, capsys):
        code, _, err = run_cli(capsys, "generate", "setting-dependent-witness",
                               "--angles", "0,1.5707963267948966,0,1.5707963267948966")
        assert code == 1
        assert "angles" in err


class TestEnumerateBound:
    def test_small_cardinality(self, capsys):
        code, out, _ = run_cli(capsys, "enumerate-bound", "2")
        assert code == 0
        doc = json.loads(out)
        assert doc["max_abs_s"] == 2.0
        assert doc["strategies"] == 2 ** 8
        assert "vertex" in doc["reduction_note"]

    def test_work_limit_exit(self, capsys):
        code, _, err = run_cli(capsys, "enumerate-bound", "8",
                               "--work-limit", "1000")
        assert code == 1
        assert "limit" in err.lower()


class TestQm:
    def test_table(self, capsys):
        code, out, _ = run_cli(capsys, "qm", "table", "0", TSIRELSON[2])
        assert code == 0
        doc = json.loads(out)
        assert doc["correlation"] == pytest.approx(-math.cos(math.pi / 4),
                                                   abs=1e-12)
        assert sum(doc["probabilities"].values()) == pytest.approx(1.0, abs=1e-12)

    def test_chsh_at_tsirelson(self, capsys):
        code, out, _ = run_cli(capsys, "qm", "chsh", *TSIRELSON)
        assert code == 0
        doc = json.loads(out)
        assert doc["s"] == pytest.approx(-2 * math.sqrt(2), abs=1e-9)
        assert doc["bell_check"]["verdict"] == "Violated"
        assert len(doc["pairs"]) == 4

    def test_search(self, capsys):
        code, out, _ = run_cli(capsys, "qm", "search",
                               "--grid-step", str(math.pi / 8),
                               "--refine-rounds", "3")
        assert code == 0
        doc = json.loads(out)
        assert doc["abs_s"] >= 2.8274
        assert set(doc["angles"]) == {"a", "a_prime", "b", "b_prime"}

    def test_search_bad_step_exit(self, capsys):
        code, _, err = run_cli(capsys, "qm", "search", "--grid-step", "2.0")
        assert code == 1
        assert "step" in err.lower()
