"""Turning a results table into figures with the companion renderer.

Runs a small method-comparison study through the harness command line,
then renders its CSV with the figures tool (installed separately from
figures/): a grouped boxplot on a linear axis and the same plot on a
log axis.  The renderer only ever sees the CSV file; the two packages
share a schema, not code.
"""

from __future__ import annotations

import subprocess
import sys
import tempfile
from pathlib import Path


def run(*args: str) -> subprocess.CompletedProcess:
    proc = subprocess.run(list(args), capture_output=True, text=True)
    if proc.returncode != 0:
        sys.stderr.write(proc.stderr)
        raise SystemExit(proc.returncode)
    return proc


def main() -> None:
    root = Path(tempfile.mkdtemp(prefix="shiftmoment_demo_"))
    run(
        sys.executable, "-m", "shiftmoment.cli", "compare",
        "--reps", "20", "--n", "100", "--seed", "3", "--out", str(root),
    )
    table = root / "method_comparison.csv"

    linear = run(
        sys.executable, "-m", "shiftfigures.cli",
        "--input", str(table), "--kind", "boxplot_by_method",
        "--out", str(root / "comparison.png"),
        "--title", "absolute error by method and target mean",
    )
    sys.stdout.write(linear.stdout)

    logged = run(
        sys.executable, "-m", "shiftfigures.cli",
        "--input", str(table), "--kind", "boxplot_by_method",
        "--out", str(root / "comparison_logy.png"), "--logy",
    )
    sys.stdout.write(logged.stdout)
    print(f"(figures under {root})")


if __name__ == "__main__":
    main()
