"""Exit codes, determinism, and config/flag precedence of the CLI."""

import json
import subprocess
import sys

import numpy as np
import pytest

from shiftmoment.cli import main


def run_cli(*argv):
    return main(list(argv))


def read_out(capsys):
    captured = capsys.readouterr()
    return captured.out, captured.err


def _write_synthetic(path, N=60, seed=3, d=1):
    rng = np.random.default_rng(seed)
    X = rng.uniform(size=(N, d))
    y = 1.0 + X[:, 0] ** 2 + 0.05 * rng.normal(size=N)
    header = ",".join(f"x{j}" for j in range(d)) + ",y"
    lines = [header] + [
        ",".join(repr(float(v)) for v in row) + f",{float(resp)!r}"
        for row, resp in zip(X, y)
    ]
    path.write_text("\n".join(lines) + "\n")
    return path


class TestDiagnose:
    def test_prints_ratio_bound_anchor(self, capsys):
        assert run_cli("diagnose") == 0
        out, _ = read_out(capsys)
        line = next(l for l in out.splitlines() if l.startswith("mu=0.4"))
        bound = float(line.split("B=")[1].split()[0])
        assert bound == pytest.approx(3.98, rel=0.01)
        assert "b_upper=" in line and "b_lower=" in line

    def test_mu_list_flag(self, capsys):
        assert run_cli("diagnose", "--mu-list", "0.2,0.6") == 0
        out, _ = read_out(capsys)
        assert out.count("mu=") == 2

    def test_a_list_rows(self, capsys):
        assert run_cli("diagnose", "--a-list", "0,10") == 0
        out, _ = read_out(capsys)
        assert out.count("a=") == 2


class TestSimulate:
    def test_shift_study_writes_deterministic_csv(self, tmp_path, capsys):
        args = ("simulate", "--study", "shift", "--reps", "5", "--n", "50",
                "--seed", "7", "--out", str(tmp_path))
        assert run_cli(*args) == 0
        first = (tmp_path / "shift_intensity.csv").read_bytes()
        assert run_cli(*args) == 0
        assert (tmp_path / "shift_intensity.csv").read_bytes() == first
        out, _ = read_out(capsys)
        assert "param=0.2" in out
        assert (tmp_path / "shift_intensity.meta.json").exists()

    def test_thread_flag_does_not_change_bytes(self, tmp_path):
        base = ("simulate", "--study", "sampling", "--reps", "3", "--n", "30",
                "--seed", "1", "--out", str(tmp_path))
        assert run_cli(*base, "--threads", "1") == 0
        one = (tmp_path / "sampling_strategy.csv").read_bytes()
        assert run_cli(*base, "--threads", "4") == 0
        assert (tmp_path / "sampling_strategy.csv").read_bytes() == one

    def test_env_var_thread_fallback(self, tmp_path, monkeypatch):
        monkeypatch.setenv("SHIFTMOMENT_THREADS", "2")
        args = ("simulate", "--study", "shift", "--reps", "2", "--n", "30",
                "--seed", "0", "--out", str(tmp_path), "--mu-list", "0.4")
        assert run_cli(*args) == 0
        monkeypatch.setenv("SHIFTMOMENT_THREADS", "junk")
        assert run_cli(*args) == 2

    def test_unknown_study_names_field(self, capsys):
        assert run_cli("simulate", "--study", "bogus") == 2
        _, err = read_out(capsys)
        assert "study" in err

    def test_unknown_flag_is_config_error(self, capsys):
        assert run_cli("simulate", "--bogus") == 2

    def test_seed_changes_bytes(self, tmp_path):
        args = ("simulate", "--study", "shift", "--reps", "2", "--n", "30",
                "--mu-list", "0.4", "--out", str(tmp_path))
        assert run_cli(*args, "--seed", "0") == 0
        a = (tmp_path / "shift_intensity.csv").read_bytes()
        assert run_cli(*args, "--seed", "1") == 0
        assert (tmp_path / "shift_intensity.csv").read_bytes() != a

    def test_writes_only_into_output_directory(self, tmp_path, monkeypatch):
        workdir = tmp_path / "cwd"
        outdir = tmp_path / "out"
        workdir.mkdir()
        monkeypatch.chdir(workdir)
        assert run_cli("simulate", "--study", "shift", "--reps", "2", "--n", "30",
                       "--mu-list", "0.4", "--out", str(outdir)) == 0
        assert list(workdir.iterdir()) == []
        names = {p.name for p in outdir.iterdir()}
        assert names == {"shift_intensity.csv", "shift_intensity.meta.json"}


class TestConfigPrecedence:
    def test_flag_overrides_config(self, tmp_path):
        config = tmp_path / "config.json"
        config.write_text(json.dumps({
            "study": "shift_intensity", "repetitions": 3, "n": 30, "mu_list": [0.2, 0.4],
        }))
        assert run_cli("simulate", "--config", str(config), "--reps", "2",
                       "--out", str(tmp_path)) == 0
        rows = (tmp_path / "shift_intensity.csv").read_text().strip().splitlines()
        assert len(rows) == 1 + 2 * 2  # header + 2 mus x 2 reps (flag won)

    def test_config_supplies_study(self, tmp_path):
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"study": "sampling", "repetitions": 2, "n": 30}))
        assert run_cli("simulate", "--config", str(config), "--out", str(tmp_path)) == 0
        assert (tmp_path / "sampling_strategy.csv").exists()

    def test_config_study_conflict(self, tmp_path, capsys):
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"study": "method_comparison"}))
        assert run_cli("simulate", "--study", "shift", "--config", str(config)) == 2
        _, err = read_out(capsys)
        assert "study" in err

    def test_missing_config_file(self, capsys):
        assert run_cli("simulate", "--config", "/nonexistent/config.json") == 2
        _, err = read_out(capsys)
        assert "config" in err

    def test_invalid_json_config(self, tmp_path, capsys):
        config = tmp_path / "broken.json"
        config.write_text("{not json")
        assert run_cli("simulate", "--config", str(config)) == 2

    def test_unknown_config_field_named(self, tmp_path, capsys):
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"study": "shift_intensity", "wibble": 1}))
        assert run_cli("simulate", "--config", str(config)) == 2
        _, err = read_out(capsys)
        assert "wibble" in err

    def test_help_documents_precedence(self, capsys):
        assert run_cli("--help") == 0
        out, _ = read_out(capsys)
        assert "precedence" in out
        assert "flags" in out and "config" in out


class TestOtherStudies:
    def test_compare_writes_records(self, tmp_path, capsys):
        assert run_cli("compare", "--reps", "2", "--n", "30", "--out", str(tmp_path)) == 0
        rows = (tmp_path / "method_comparison.csv").read_text().strip().splitlines()
        assert len(rows) == 1 + 3 * 3 * 2
        out, _ = read_out(capsys)
        assert "mc median=" in out

    def test_truncation_writes_records(self, tmp_path):
        assert run_cli("truncation", "--reps", "2", "--n", "30", "--mu-list", "0.6",
                       "--out", str(tmp_path)) == 0
        rows = (tmp_path / "truncation_study.csv").read_text().strip().splitlines()
        assert len(rows) == 1 + 2 * 2

    def test_function_class(self, tmp_path, capsys):
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"error_targets": [0.1], "sweep_cap": 60}))
        assert run_cli("function-class", "--reps", "2", "--k-list", "4",
                       "--config", str(config), "--out", str(tmp_path)) == 0
        out, _ = read_out(capsys)
        assert "k=4" in out and "->" in out
        assert (tmp_path / "function_class.csv").exists()

    def test_regressor_flag(self, tmp_path):
        assert run_cli("simulate", "--study", "shift", "--reps", "2", "--n", "30",
                       "--mu-list", "0.4", "--regressor", "linear:2",
                       "--out", str(tmp_path)) == 0
        meta = json.loads((tmp_path / "shift_intensity.meta.json").read_text())
        assert meta["spec"]["regressor"] == {"kind": "linear", "degree": 2}

    def test_bad_regressor_flag(self, capsys):
        assert run_cli("simulate", "--study", "shift", "--regressor", "spline") == 2
        _, err = read_out(capsys)
        assert "regressor" in err


class TestEstimate:
    def test_missing_data_file_exit_3_with_path(self, capsys, tmp_path):
        missing = tmp_path / "no_such_table.csv"
        assert run_cli("estimate", "--data", str(missing), "--out", str(tmp_path)) == 3
        _, err = read_out(capsys)
        assert str(missing) in err

    def test_data_flag_required(self, capsys, tmp_path):
        assert run_cli("estimate", "--out", str(tmp_path)) == 2
        _, err = read_out(capsys)
        assert "data" in err

    def test_protocol_runs_and_writes(self, tmp_path, capsys):
        data = _write_synthetic(tmp_path / "table.csv")
        assert run_cli("estimate", "--data", str(data), "--reps", "3", "--beta", "2.0",
                       "--seed", "4", "--out", str(tmp_path)) == 0
        rows = (tmp_path / "csv_protocol.csv").read_text().strip().splitlines()
        assert len(rows) == 1 + 3 * 3

    def test_single_estimate_prints_json(self, tmp_path, capsys):
        data = _write_synthetic(tmp_path / "lab.csv", N=80, d=2)
        rng = np.random.default_rng(8)
        U = 0.5 + 0.5 * rng.uniform(size=(50, 2))
        unl = tmp_path / "unl.csv"
        unl.write_text("x0,x1\n" + "\n".join(f"{float(a)!r},{float(b)!r}" for a, b in U) + "\n")
        assert run_cli("estimate", "--data", str(data), "--unlabeled", str(unl),
                       "--seed", "2") == 0
        out, _ = read_out(capsys)
        payload = json.loads(out)
        assert payload["kind"] == "plugin"
        assert np.isfinite(payload["value"])
        assert payload["diagnostics"]["threshold_used"] > 0

    def test_single_estimate_feature_mismatch(self, tmp_path, capsys):
        data = _write_synthetic(tmp_path / "lab.csv", N=40, d=2)
        unl = tmp_path / "unl.csv"
        unl.write_text("x0\n0.5\n0.6\n")
        assert run_cli("estimate", "--data", str(data), "--unlabeled", str(unl)) == 3
        _, err = read_out(capsys)
        assert "feature column" in err

    def test_single_estimate_deterministic(self, tmp_path, capsys):
        data = _write_synthetic(tmp_path / "lab.csv", N=60)
        rng = np.random.default_rng(9)
        unl = tmp_path / "unl.csv"
        unl.write_text("x0\n" + "\n".join(repr(float(v)) for v in rng.uniform(size=30)) + "\n")
        assert run_cli("estimate", "--data", str(data), "--unlabeled", str(unl), "--seed", "5") == 0
        first, _ = read_out(capsys)
        assert run_cli("estimate", "--data", str(data), "--unlabeled", str(unl), "--seed", "5") == 0
        second, _ = read_out(capsys)
        assert first == second


class TestModuleEntryPoint:
    def test_python_dash_m_invocation(self, tmp_path):
        result = subprocess.run(
            [sys.executable, "-m", "shiftmoment.cli", "diagnose", "--mu-list", "0.4"],
            capture_output=True, text=True,
        )
        assert result.returncode == 0
        assert "B=3.9765" in result.stdout
