"""Command line behavior: exit codes, messages, determinism."""

from __future__ import annotations

import subprocess
import sys
from pathlib import Path

import pytest

from shiftfigures.cli import main

from test_figures_renderer import HEADER, PNG_MAGIC, curve_rows, shift_rows, write_table


class TestExitCodes:
    def test_success_reports_groups_and_rows(self, tmp_path: Path, capsys) -> None:
        table = write_table(tmp_path / "r.csv", shift_rows(params=(0.2, 0.4, 0.6), reps=3))
        out = tmp_path / "o.png"
        code = main(["--input", str(table), "--kind", "boxplot_by_param", "--out", str(out)])
        assert code == 0
        line = capsys.readouterr().out
        assert "wrote" in line and "3 groups" in line and "9 rows" in line
        assert out.read_bytes().startswith(PNG_MAGIC)

    def test_existing_output_refused(self, tmp_path: Path, capsys) -> None:
        table = write_table(tmp_path / "r.csv", shift_rows())
        out = tmp_path / "o.png"
        args = ["--input", str(table), "--kind", "boxplot_by_param", "--out", str(out)]
        assert main(args) == 0
        assert main(args) == 1
        assert "--force" in capsys.readouterr().err

    def test_force_allows_overwrite(self, tmp_path: Path) -> None:
        table = write_table(tmp_path / "r.csv", shift_rows())
        out = tmp_path / "o.png"
        args = ["--input", str(table), "--kind", "boxplot_by_param", "--out", str(out)]
        assert main(args) == 0
        assert main(args + ["--force"]) == 0

    def test_header_only_exits_3_naming_column(self, tmp_path: Path, capsys) -> None:
        path = tmp_path / "empty.csv"
        path.write_text(HEADER + "\n", encoding="utf-8")
        out = tmp_path / "never.png"
        code = main(["--input", str(path), "--kind", "boxplot_by_param", "--out", str(out)])
        assert code == 3
        assert "'abs_error'" in capsys.readouterr().err
        assert not out.exists()

    def test_missing_schema_column_exits_3(self, tmp_path: Path, capsys) -> None:
        path = tmp_path / "short.csv"
        path.write_text("study,param,method,rep,estimate,truth\na,1,m,0,1,1\n", encoding="utf-8")
        code = main(
            ["--input", str(path), "--kind", "boxplot_by_param", "--out", str(tmp_path / "o.png")]
        )
        assert code == 3
        assert "'abs_error'" in capsys.readouterr().err

    def test_missing_input_exits_3_naming_path(self, tmp_path: Path, capsys) -> None:
        code = main(
            [
                "--input",
                str(tmp_path / "nowhere.csv"),
                "--kind",
                "boxplot_by_param",
                "--out",
                str(tmp_path / "o.png"),
            ]
        )
        assert code == 3
        assert "nowhere.csv" in capsys.readouterr().err

    def test_unknown_kind_exits_2(self, tmp_path: Path) -> None:
        assert main(["--input", "r.csv", "--kind", "pie", "--out", "o.png"]) == 2

    def test_missing_required_flag_exits_2(self) -> None:
        assert main(["--input", "r.csv", "--kind", "boxplot_by_param"]) == 2

    def test_bad_group_column_exits_2(self, tmp_path: Path, capsys) -> None:
        table = write_table(tmp_path / "r.csv", shift_rows())
        code = main(
            [
                "--input",
                str(table),
                "--kind",
                "boxplot_by_param",
                "--out",
                str(tmp_path / "o.png"),
                "--group-columns",
                "wibble",
            ]
        )
        assert code == 2
        assert "'wibble'" in capsys.readouterr().err

    def test_help_exits_0_and_lists_kinds(self, capsys) -> None:
        assert main(["--help"]) == 0
        text = capsys.readouterr().out
        for kind in ("boxplot_by_param", "boxplot_by_method", "required_n_curve"):
            assert kind in text


class TestRendering:
    def test_rerun_is_byte_identical(self, tmp_path: Path) -> None:
        table = write_table(tmp_path / "fc.csv", curve_rows())
        out = tmp_path / "o.png"
        args = [
            "--input",
            str(table),
            "--kind",
            "required_n_curve",
            "--out",
            str(out),
            "--force",
        ]
        assert main(args) == 0
        first = out.read_bytes()
        assert main(args) == 0
        assert out.read_bytes() == first

    def test_logy_flag_changes_output(self, tmp_path: Path) -> None:
        table = write_table(tmp_path / "r.csv", shift_rows(reps=6))
        lin = tmp_path / "lin.png"
        log = tmp_path / "log.png"
        base = ["--input", str(table), "--kind", "boxplot_by_param"]
        assert main(base + ["--out", str(lin)]) == 0
        assert main(base + ["--out", str(log), "--logy"]) == 0
        assert lin.read_bytes() != log.read_bytes()

    def test_alternate_group_columns(self, tmp_path: Path, capsys) -> None:
        table = write_table(
            tmp_path / "r.csv", shift_rows(reps=3, methods=("two_stage", "two_stage_trunc"))
        )
        code = main(
            [
                "--input",
                str(table),
                "--kind",
                "boxplot_by_method",
                "--out",
                str(tmp_path / "o.png"),
                "--group-columns",
                "study,method",
            ]
        )
        assert code == 0
        assert "2 groups" in capsys.readouterr().out

    def test_module_entry_point(self, tmp_path: Path) -> None:
        table = write_table(tmp_path / "r.csv", shift_rows())
        out = tmp_path / "o.svg"
        proc = subprocess.run(
            [
                sys.executable,
                "-m",
                "shiftfigures.cli",
                "--input",
                str(table),
                "--kind",
                "boxplot_by_param",
                "--out",
                str(out),
            ],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0, proc.stderr
        assert "wrote" in proc.stdout
        assert out.read_bytes().startswith(b"<?xml")
