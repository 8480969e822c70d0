"""Command line entry point: one figure per invocation.

Exit codes: 0 success, 2 invalid flags or spec fields, 3 missing or
malformed input table, 1 overwrite refusal or unexpected failure.
"""

from __future__ import annotations

import argparse
import sys

from .errors import ConfigurationError, InputDataError, OutputExistsError, SchemaError
from .renderer import KINDS, SCHEMA, FigureSpec, render

_EPILOG = """\
input schema: %s
boxplots show median, quartiles, and whiskers of abs_error per group;
required_n_curve plots estimate (required n) against truth (error
target), one line per value of the first group column.
""" % ",".join(SCHEMA)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="figures",
        description="Render a grouped plot from a results CSV.",
        epilog=_EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--input", required=True, help="results CSV path")
    parser.add_argument("--kind", required=True, choices=KINDS, help="figure family")
    parser.add_argument("--out", required=True, help="output image path (.png or .svg)")
    parser.add_argument(
        "--group-columns",
        default="param,method",
        help="grouping columns, comma-separated (default: param,method)",
    )
    parser.add_argument("--title", default=None, help="figure title")
    parser.add_argument("--xlabel", default=None, help="x axis label override")
    parser.add_argument("--ylabel", default=None, help="y axis label override")
    parser.add_argument(
        "--logy", action="store_true", help="log-scale y axis (default: linear)"
    )
    parser.add_argument(
        "--force", action="store_true", help="overwrite an existing output file"
    )
    return parser


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad flags and 0 on --help; surface as a return.
        return int(exc.code or 0)
    columns = tuple(part.strip() for part in args.group_columns.split(",") if part.strip())
    try:
        spec = FigureSpec(
            input_path=args.input,
            kind=args.kind,
            out_path=args.out,
            group_columns=columns,
            title=args.title,
            xlabel=args.xlabel,
            ylabel=args.ylabel,
            logy=args.logy,
            force=args.force,
        )
        report = render(spec)
    except ConfigurationError as exc:
        print(f"figures: {exc}", file=sys.stderr)
        return 2
    except (InputDataError, SchemaError) as exc:
        print(f"figures: {exc}", file=sys.stderr)
        return 3
    except OutputExistsError as exc:
        print(f"figures: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:
        print(f"figures: unexpected failure: {exc}", file=sys.stderr)
        return 1
    print(
        f"wrote {report.out_path} "
        f"({report.kind}: {report.groups} groups, {report.rows} rows)"
    )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
