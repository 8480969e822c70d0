"""Command-line front end for the experiment runners and one-shot estimation.

Subcommands map onto the study runners (simulate, compare, truncation,
function-class), the CSV evaluation protocol and single plug-in estimation
(estimate), and shift diagnostics (diagnose).  Studies write a results CSV
plus a metadata JSON sidecar into the output directory and print a one-line
summary per parameter value.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

import numpy as np

from .distributions import PolyFamily, SourceTargetPair, TruncatedNormal, Uniform, density_bounds
from .errors import ConfigurationError, DomainError, InputDataError
from .estimators import EstimatorConfig, estimate_two_stage_plugin
from .experiments import (
    ExperimentSpec,
    experiment_spec_from_json,
    load_table,
    run_experiment,
    write_metadata,
    write_records,
)
from .ratio import UnlabeledDataset, fit_propensity, ratio_at, suggest_threshold
from .regressors import LabeledDataset, Linear, MovingLeastSquares, RandomForest

_EPILOG = """\
configuration precedence (highest wins):
  1. command-line flags
  2. --config JSON file (fields mirror the experiment spec:
     study, repetitions, n, m, q, base_seed, mu_list, a_list, k_list,
     error_targets, sweep_cap, threshold, threshold_rule, alpha, regressor,
     csv_path, unlabeled_path, beta, feature_degree)
  3. built-in defaults

threads come from --threads, else SHIFTMOMENT_THREADS, else all cores.
"""

_SIMULATE_STUDIES = {
    "shift": "shift_intensity",
    "shift_intensity": "shift_intensity",
    "sampling": "sampling_strategy",
    "sampling_strategy": "sampling_strategy",
}


def _parse_regressor(text: str):
    """Parse 'forest[:trees]', 'linear[:degree]', or 'mls[:degree]'."""
    name, _, arg = text.partition(":")
    try:
        value = int(arg) if arg else None
    except ValueError:
        raise ConfigurationError(f"regressor: bad numeric argument in {text!r}") from None
    if name == "forest":
        return RandomForest() if value is None else RandomForest(trees=value)
    if name == "linear":
        return Linear() if value is None else Linear(degree=value)
    if name == "mls":
        return MovingLeastSquares() if value is None else MovingLeastSquares(degree=value)
    raise ConfigurationError(f"regressor: unknown kind {text!r}; expected forest, linear, or mls")


def _float_list(flag: str):
    def parse(text: str):
        try:
            return tuple(float(tok) for tok in text.split(",") if tok.strip() != "")
        except ValueError:
            raise argparse.ArgumentTypeError(f"{flag}: expected comma-separated numbers, got {text!r}")
    return parse


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shiftmoment",
        description="Calibrated moment estimation under covariate shift.",
        epilog=_EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_common(p):
        p.add_argument("--config", type=Path, default=None, help="JSON config file")
        p.add_argument("--reps", type=int, default=None, help="replications per parameter value")
        p.add_argument("--n", type=int, default=None, help="labeled sample size per replication")
        p.add_argument("--m", type=int, default=None, help="target/unlabeled sample size")
        p.add_argument("--q", type=int, default=None, help="moment order")
        p.add_argument("--seed", type=int, default=None, help="base seed; fully determines output")
        p.add_argument("--threads", type=int, default=None, help="worker threads (default: all cores)")
        p.add_argument("--out", type=Path, default=Path("."), help="output directory")
        p.add_argument("--regressor", type=str, default=None,
                       help="forest[:trees] | linear[:degree] | mls[:degree]")
        p.add_argument("--threshold", type=float, default=None, help="fixed truncation level")
        p.add_argument("--threshold-rule", choices=("none", "halfB", "threeQuarterB", "theory"),
                       default=None, help="truncation preset (overridden by --threshold)")
        p.add_argument("--alpha", type=float, default=None, help="tail exponent for the theory rule")
        p.add_argument("--mu-list", type=_float_list("--mu-list"), default=None,
                       help="target means, comma-separated")
        p.add_argument("--a-list", type=_float_list("--a-list"), default=None,
                       help="source-design parameters, comma-separated")
        p.add_argument("--k-list", type=_float_list("--k-list"), default=None,
                       help="test-function roughness values, comma-separated")
        p.add_argument("--data", type=Path, default=None, help="labeled CSV (features..., response)")
        p.add_argument("--unlabeled", type=Path, default=None, help="unlabeled CSV (features only)")
        p.add_argument("--beta", type=_float_list("--beta"), default=None,
                       help="tilt vector, comma-separated, one entry per feature")

    p_sim = sub.add_parser("simulate", help="shift-intensity or sampling-strategy study",
                           epilog=_EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter)
    p_sim.add_argument("--study", type=str, default=None,
                       help="shift | sampling (or full study names)")
    add_common(p_sim)
    for name, help_text in (
        ("compare", "Monte Carlo vs one-stage vs two-stage comparison"),
        ("truncation", "truncated vs untruncated two-stage study"),
        ("function-class", "required sample size per roughness level"),
        ("estimate", "CSV protocol, or one plug-in estimate with --unlabeled"),
        ("diagnose", "print B and source density bounds for configured pairs"),
    ):
        p = sub.add_parser(name, help=help_text, epilog=_EPILOG,
                           formatter_class=argparse.RawDescriptionHelpFormatter)
        add_common(p)
    return parser


def _load_config(path: Path | None) -> dict:
    if path is None:
        return {}
    if not path.exists():
        raise ConfigurationError(f"config: file not found: {path}")
    try:
        obj = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ConfigurationError(f"config: invalid JSON in {path}: {e}") from None
    if not isinstance(obj, dict):
        raise ConfigurationError("config: top level must be a JSON object")
    return obj


def _resolve_spec(args, study: str) -> ExperimentSpec:
    """Merge built-in defaults, config file, and flags (flags win)."""
    config = _load_config(args.config)
    config["study"] = _SIMULATE_STUDIES.get(config.get("study", study), config.get("study", study))
    if config["study"] != study:
        raise ConfigurationError(
            f"study: config file says {config['study']!r} but the subcommand implies {study!r}"
        )
    overrides = {
        "repetitions": args.reps,
        "n": args.n,
        "m": args.m,
        "q": args.q,
        "base_seed": args.seed,
        "threshold": args.threshold,
        "threshold_rule": getattr(args, "threshold_rule", None),
        "alpha": args.alpha,
        "mu_list": args.mu_list,
        "a_list": args.a_list,
        "k_list": args.k_list,
        "beta": args.beta,
    }
    if args.regressor is not None:
        overrides["regressor"] = _parse_regressor(args.regressor).to_json()
    if args.data is not None:
        overrides["csv_path"] = str(args.data)
    if args.unlabeled is not None:
        overrides["unlabeled_path"] = str(args.unlabeled)
    for key, value in overrides.items():
        if value is not None:
            config[key] = value
    spec = experiment_spec_from_json(config)
    return spec


def _thread_count(args) -> int:
    if args.threads is not None:
        if args.threads < 1:
            raise ConfigurationError(f"threads: must be >= 1, got {args.threads}")
        return args.threads
    env = os.environ.get("SHIFTMOMENT_THREADS")
    if env is not None:
        try:
            value = int(env)
        except ValueError:
            raise ConfigurationError(
                f"threads: SHIFTMOMENT_THREADS must be an integer, got {env!r}"
            ) from None
        if value < 1:
            raise ConfigurationError(f"threads: SHIFTMOMENT_THREADS must be >= 1, got {value}")
        return value
    return os.cpu_count() or 1


def _print_study_summary(records) -> None:
    by_param: dict[float, dict[str, list]] = {}
    for r in records:
        by_param.setdefault(r.param, {}).setdefault(r.method, []).append(r.abs_error)
    for param in sorted(by_param):
        parts = []
        for method in sorted(by_param[param]):
            errs = np.asarray(by_param[param][method])
            q1, q3 = np.percentile(errs, [25, 75])
            parts.append(f"{method} median={np.median(errs):.6g} iqr={q3 - q1:.6g} ({errs.size} reps)")
        print(f"param={param:g}: " + "; ".join(parts))


def _run_study(args, study: str) -> int:
    spec = _resolve_spec(args, study)
    threads = _thread_count(args)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    records, metadata = run_experiment(spec, threads)
    csv_path = out_dir / f"{spec.study}.csv"
    write_records(records, csv_path)
    write_metadata(metadata, csv_path)
    if spec.study == "function_class":
        for r in records:
            flag = " (cap reached)" if metadata.get("hit_cap") else ""
            print(f"k={r.param:g}: target {r.truth:g} -> n={int(r.estimate)}{flag}")
    else:
        _print_study_summary(records)
    print(f"wrote {csv_path}")
    return 0


def _load_unlabeled(path: Path) -> tuple[np.ndarray, list]:
    if not path.exists():
        raise InputDataError(f"input file not found: {path}")
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise InputDataError(f"{path}: empty file, expected a header row") from None
        rows = []
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise InputDataError(
                    f"{path}: row {line_no} has {len(row)} fields, expected {len(header)}"
                )
            parsed = []
            for col, cell in zip(header, row):
                try:
                    parsed.append(float(cell))
                except ValueError:
                    raise InputDataError(
                        f"{path}: row {line_no}, column {col!r}: could not parse {cell!r} as a number"
                    ) from None
            rows.append(parsed)
    if not rows:
        raise InputDataError(f"{path}: no data rows")
    return np.asarray(rows, dtype=float), header


def _run_single_estimate(args) -> int:
    """Plug-in estimate on a labeled CSV plus an unlabeled target CSV."""
    spec = _resolve_spec(args, "csv_protocol")
    if spec.csv_path is None:
        raise ConfigurationError("data: --data (or csv_path in the config) is required")
    if spec.unlabeled_path is None:
        raise ConfigurationError("unlabeled: --unlabeled is required for a single estimate")
    X_raw, ys, header = load_table(spec.csv_path)
    U_raw, u_header = _load_unlabeled(Path(spec.unlabeled_path))
    if U_raw.shape[1] != X_raw.shape[1]:
        raise InputDataError(
            f"{spec.unlabeled_path}: {U_raw.shape[1]} feature column(s), "
            f"but {spec.csv_path} has {X_raw.shape[1]}"
        )
    # Joint min-max standardization so both samples land in the unit cube.
    pooled = np.vstack([X_raw, U_raw])
    lo, hi = pooled.min(axis=0), pooled.max(axis=0)
    span = np.where(hi > lo, hi - lo, 1.0)
    X = (X_raw - lo) / span
    U = (U_raw - lo) / span
    X[:, hi == lo] = 0.5
    U[:, hi == lo] = 0.5

    labeled = LabeledDataset(X, ys)
    unlabeled = UnlabeledDataset(U)
    rng = np.random.default_rng(np.random.SeedSequence(spec.base_seed))
    prop = fit_propensity(UnlabeledDataset(X), unlabeled, spec.feature_degree, rng)
    w_all = ratio_at(prop, X)
    if spec.threshold is not None:
        T = spec.threshold
    elif spec.threshold_rule == "theory":
        T = suggest_threshold(labeled.n, 2.0, 2.0, spec.q, labeled.dim, spec.alpha)
    elif spec.threshold_rule == "halfB":
        T = float(np.max(w_all)) / 2
    else:
        T = 0.75 * float(np.max(w_all))
    regressor = spec.regressor if spec.regressor is not None else RandomForest()
    config = EstimatorConfig(q=spec.q, threshold=T, regressor=regressor)
    estimate = estimate_two_stage_plugin(labeled, unlabeled, config, prop, rng)
    print(json.dumps(estimate.to_json(), indent=2, sort_keys=True))
    return 0


def _run_estimate(args) -> int:
    if args.unlabeled is not None or (_load_config(args.config).get("unlabeled_path") is not None):
        return _run_single_estimate(args)
    spec = _resolve_spec(args, "csv_protocol")
    if spec.csv_path is None:
        raise ConfigurationError("data: --data (or csv_path in the config) is required")
    return _run_study(args, "csv_protocol")


def _run_diagnose(args) -> int:
    config = _load_config(args.config)
    mus = args.mu_list if args.mu_list is not None else config.get("mu_list")
    if mus is None:
        mus = (0.2, 0.4, 0.6, 0.8)
    a_list = args.a_list if args.a_list is not None else config.get("a_list")
    source = TruncatedNormal(0, 1, 0.2, 0.3)
    lo, hi = density_bounds(source)
    for mu in mus:
        pair = SourceTargetPair(source, TruncatedNormal(0, 1, float(mu), 0.3))
        print(f"mu={mu:g}: B={pair.sup_ratio():.6g} b_upper={hi:.6g} b_lower={lo:.6g}")
    if a_list is not None:
        for a in a_list:
            source_a = PolyFamily(float(a))
            pair = SourceTargetPair(source_a, Uniform())
            lo_a, hi_a = density_bounds(source_a)
            print(f"a={a:g}: B={pair.sup_ratio():.6g} b_upper={hi_a:.6g} b_lower={lo_a:.6g}")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if e.code is not None else 0
    try:
        if args.subcommand == "simulate":
            label = args.study
            if label is None:
                label = _load_config(args.config).get("study", "shift")
            if label not in _SIMULATE_STUDIES:
                raise ConfigurationError(
                    f"study: unknown value {label!r}; expected shift or sampling"
                )
            return _run_study(args, _SIMULATE_STUDIES[label])
        if args.subcommand == "compare":
            return _run_study(args, "method_comparison")
        if args.subcommand == "truncation":
            return _run_study(args, "truncation_study")
        if args.subcommand == "function-class":
            return _run_study(args, "function_class")
        if args.subcommand == "estimate":
            return _run_estimate(args)
        if args.subcommand == "diagnose":
            return _run_diagnose(args)
        raise ConfigurationError(f"subcommand: unknown {args.subcommand!r}")
    except ConfigurationError as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return 2
    except (InputDataError, DomainError) as e:
        print(f"input error: {e}", file=sys.stderr)
        return 3
    except Exception as e:  # pragma: no cover - defensive
        print(f"internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
