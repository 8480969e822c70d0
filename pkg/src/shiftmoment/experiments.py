"""Seeded, replicated studies of the estimators, emitting tabular records.

Five synthetic studies (shift intensity, sampling strategy, function
class, method comparison, truncation) and a generic CSV protocol for real
tables.  Every replication derives its random stream from
SeedSequence(base_seed, spawn_key=(study, parameter index, replication)),
so tables are bitwise reproducible and independent of the thread count.
"""

from __future__ import annotations

import csv
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .distributions import (
    Density,
    PolyFamily,
    SourceTargetPair,
    TruncatedNormal,
    Uniform,
    density_bounds,
)
from .errors import ConfigurationError, InputDataError
from .estimators import (
    EstimatorConfig,
    MonteCarlo,
    estimate_mc,
    estimate_one_stage,
    estimate_two_stage_known,
    estimate_two_stage_plugin,
)
from .ratio import UnlabeledDataset, fit_propensity, ratio_at, suggest_threshold
from .regressors import (
    LabeledDataset,
    Linear,
    RandomForest,
    RegressorSpec,
    fit as fit_regressor,
    regressor_from_json,
)

STUDIES = (
    "shift_intensity",
    "sampling_strategy",
    "function_class",
    "method_comparison",
    "truncation_study",
    "csv_protocol",
)
_STUDY_ID = {name: index for index, name in enumerate(STUDIES)}

CSV_HEADER = "study,param,method,rep,estimate,truth,abs_error"

_ORACLE_NODES = 2048
_SWEEP_STEP = 10

# Smoothness/integrability proxies for the theory threshold rule; only the
# tail exponent alpha is a user-facing knob.
_THEORY_S = 2.0
_THEORY_P = 2.0


@dataclass(frozen=True)
class SinFamily:
    """f(x) = 1 + x^2 + sin(k x)/5; larger k means a rougher function."""

    k: float

    def __call__(self, x):
        return 1.0 + x**2 + np.sin(self.k * x) / 5.0

    def to_json(self):
        return {"kind": "sin", "k": self.k}


@dataclass(frozen=True)
class Custom:
    """Piecewise-linear test function tabulated on a uniform grid."""

    values: tuple

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if len(vals) < 2:
            raise ConfigurationError("a tabulated test function needs at least 2 values")
        if not np.isfinite(vals).all():
            raise ConfigurationError("test function values must be finite")
        object.__setattr__(self, "values", vals)

    def __call__(self, x):
        grid = np.linspace(0.0, 1.0, len(self.values))
        return np.interp(x, grid, self.values)

    def to_json(self):
        return {"kind": "custom", "values": list(self.values)}


TestFunction = SinFamily | Custom


@dataclass(frozen=True)
class TrialRecord:
    study: str
    param: float
    method: str
    rep: int
    estimate: float
    truth: float
    abs_error: float


@dataclass(frozen=True)
class FunctionClassRow:
    k: float
    error_target: float
    required_n: int
    median_error: float
    hit_cap: bool


@dataclass(frozen=True)
class ExperimentSpec:
    study: str
    repetitions: int = 100
    n: int = 200
    m: int | None = None
    q: int = 2
    base_seed: int = 0
    mu_list: tuple | None = None
    a_list: tuple = (0.0, 3.0, 7.0, 10.0)
    k_list: tuple = (4.0, 16.0, 32.0, 64.0)
    error_targets: tuple = (0.1, 0.05, 0.01, 0.001)
    sweep_cap: int = 5000
    threshold: float | None = None
    threshold_rule: str = "none"
    alpha: float = 2.0
    regressor: RegressorSpec | None = None
    csv_path: str | None = None
    unlabeled_path: str | None = None
    beta: tuple | None = None
    feature_degree: int = 3

    def __post_init__(self):
        if self.study not in STUDIES:
            raise ConfigurationError(
                f"unknown study {self.study!r}; expected one of {', '.join(STUDIES)}"
            )
        if self.repetitions < 1:
            raise ConfigurationError("repetitions must be >= 1")
        if self.n < 2:
            raise ConfigurationError("n must be >= 2")
        if self.q < 1:
            raise ConfigurationError("q must be >= 1")
        if self.threshold_rule not in ("none", "halfB", "theory", "threeQuarterB"):
            raise ConfigurationError(
                f"unknown threshold rule {self.threshold_rule!r}; "
                "expected none, halfB, threeQuarterB, or theory"
            )
        if self.mu_list is not None and len(self.mu_list) == 0:
            raise ConfigurationError("mu list must be nonempty")
        if len(self.a_list) == 0 or len(self.k_list) == 0 or len(self.error_targets) == 0:
            raise ConfigurationError("parameter lists must be nonempty")

    def to_json(self):
        payload = {
            "study": self.study,
            "repetitions": self.repetitions,
            "n": self.n,
            "m": self.m,
            "q": self.q,
            "base_seed": self.base_seed,
            "mu_list": None if self.mu_list is None else list(self.mu_list),
            "a_list": list(self.a_list),
            "k_list": list(self.k_list),
            "error_targets": list(self.error_targets),
            "sweep_cap": self.sweep_cap,
            "threshold": self.threshold,
            "threshold_rule": self.threshold_rule,
            "alpha": self.alpha,
            "regressor": None if self.regressor is None else self.regressor.to_json(),
            "csv_path": self.csv_path,
            "unlabeled_path": self.unlabeled_path,
            "beta": None if self.beta is None else list(self.beta),
            "feature_degree": self.feature_degree,
        }
        return payload


def experiment_spec_from_json(obj: dict) -> ExperimentSpec:
    if not isinstance(obj, dict):
        raise ConfigurationError("experiment config must be a JSON object")
    known = {
        "study", "repetitions", "n", "m", "q", "base_seed", "mu_list", "a_list",
        "k_list", "error_targets", "sweep_cap", "threshold", "threshold_rule",
        "alpha", "regressor", "csv_path", "unlabeled_path", "beta", "feature_degree",
    }
    unknown = set(obj) - known
    if unknown:
        raise ConfigurationError(f"unknown config fields: {', '.join(sorted(unknown))}")
    if "study" not in obj:
        raise ConfigurationError("config is missing the 'study' field")
    kwargs = dict(obj)
    for key in ("mu_list", "a_list", "k_list", "error_targets", "beta"):
        if kwargs.get(key) is not None:
            kwargs[key] = tuple(kwargs[key])
    if kwargs.get("regressor") is not None:
        kwargs["regressor"] = regressor_from_json(kwargs["regressor"])
    return ExperimentSpec(**{k: v for k, v in kwargs.items() if v is not None})


def truth_oracle(f, target: Density, q: int) -> float:
    """Brute-force 2048-node Gauss-Legendre integral of f(x)^q p*(x)."""
    if target.dim != 1:
        raise ConfigurationError("the quadrature truth oracle is one-dimensional")
    t, u = np.polynomial.legendre.leggauss(_ORACLE_NODES)
    xs = 0.5 * (t + 1.0)
    return float(np.sum(0.5 * u * np.asarray(f(xs), dtype=float) ** q * target.pdf(xs)))


def _rep_stream(base_seed: int, study: str, param_index: int, rep: int, extra: int = 0):
    key = (_STUDY_ID[study], param_index, rep) if extra == 0 else (
        _STUDY_ID[study], param_index, extra, rep
    )
    return np.random.default_rng(np.random.SeedSequence(base_seed, spawn_key=key))


def _map_reps(body, count: int, threads: int):
    if threads <= 1:
        return [body(rep) for rep in range(count)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(body, range(count)))


def _resolve_threshold(spec: ExperimentSpec, B: float | None) -> float | None:
    if spec.threshold is not None:
        return spec.threshold
    rule = spec.threshold_rule
    if rule == "none":
        return None
    if rule == "theory":
        return suggest_threshold(spec.n, _THEORY_S, _THEORY_P, spec.q, 1, spec.alpha)
    if B is None:
        raise ConfigurationError(f"threshold rule {rule!r} needs a computable ratio bound")
    return B / 2 if rule == "halfB" else 0.75 * B


def _record(study, param, method, rep, estimate, truth):
    return TrialRecord(
        study, float(param), method, int(rep),
        float(estimate), float(truth), abs(float(estimate) - float(truth)),
    )


# --- synthetic studies ------------------------------------------------------


def run_shift_intensity(spec: ExperimentSpec, threads: int = 1) -> list[TrialRecord]:
    """Error of the calibrated estimator as the target mean moves away."""
    mus = spec.mu_list if spec.mu_list is not None else (0.2, 0.4, 0.6, 0.8)
    f = SinFamily(16.0)
    source = TruncatedNormal(0, 1, 0.2, 0.3)
    regressor = spec.regressor if spec.regressor is not None else RandomForest()
    records = []
    for p_idx, mu in enumerate(mus):
        target = TruncatedNormal(0, 1, float(mu), 0.3)
        pair = SourceTargetPair(source, target)
        truth = truth_oracle(f, target, spec.q)
        config = EstimatorConfig(
            q=spec.q, threshold=_resolve_threshold(spec, pair.sup_ratio()), regressor=regressor
        )

        def body(rep, mu=mu, p_idx=p_idx, pair=pair, truth=truth, config=config):
            rng = _rep_stream(spec.base_seed, spec.study, p_idx, rep)
            xs = source.sample(spec.n, rng)[:, 0]
            data = LabeledDataset(xs, f(xs))
            est = estimate_two_stage_known(data, pair, config, rng)
            return _record(spec.study, mu, est.kind, rep, est.value, truth)

        records.extend(_map_reps(body, spec.repetitions, threads))
    return records


def run_sampling_strategy(spec: ExperimentSpec, threads: int = 1) -> list[TrialRecord]:
    """Error as the source design varies its peak height at fixed ratio bound."""
    f = SinFamily(16.0)
    target = Uniform()
    truth = truth_oracle(f, target, spec.q)
    regressor = spec.regressor if spec.regressor is not None else RandomForest()
    records = []
    for p_idx, a in enumerate(spec.a_list):
        source = PolyFamily(float(a))
        pair = SourceTargetPair(source, target)
        config = EstimatorConfig(
            q=spec.q, threshold=_resolve_threshold(spec, pair.sup_ratio()), regressor=regressor
        )

        def body(rep, a=a, p_idx=p_idx, source=source, pair=pair, config=config):
            rng = _rep_stream(spec.base_seed, spec.study, p_idx, rep)
            xs = source.sample(spec.n, rng)[:, 0]
            data = LabeledDataset(xs, f(xs))
            est = estimate_two_stage_known(data, pair, config, rng)
            return _record(spec.study, a, est.kind, rep, est.value, truth)

        records.extend(_map_reps(body, spec.repetitions, threads))
    return records


def run_function_class(spec: ExperimentSpec, threads: int = 1) -> list[FunctionClassRow]:
    """Sample size needed per roughness level to reach each error target.

    For each k the sweep raises n by 10 until the median error over
    `repetitions` replications falls below the smallest target (or the cap);
    each target then reports the swept n whose median error is closest.
    """
    source = Uniform()
    target = TruncatedNormal(0, 1, 0.6, 0.6)
    pair = SourceTargetPair(source, target)
    regressor = spec.regressor if spec.regressor is not None else RandomForest()
    floor = min(spec.error_targets)
    rows = []
    for k_idx, k in enumerate(spec.k_list):
        f = SinFamily(float(k))
        truth = truth_oracle(f, target, spec.q)
        config = EstimatorConfig(
            q=spec.q, threshold=_resolve_threshold(spec, pair.sup_ratio()), regressor=regressor
        )
        medians: dict[int, float] = {}
        n = _SWEEP_STEP
        hit_cap = False
        while True:

            def body(rep, n=n, k_idx=k_idx, config=config, truth=truth, f=f):
                rng = _rep_stream(spec.base_seed, spec.study, k_idx, rep, extra=n)
                xs = source.sample(n, rng)[:, 0]
                data = LabeledDataset(xs, f(xs))
                est = estimate_two_stage_known(data, pair, config, rng)
                return abs(est.value - truth)

            errors = _map_reps(body, spec.repetitions, threads)
            medians[n] = float(np.median(errors))
            if medians[n] < floor:
                break
            if n >= spec.sweep_cap:
                hit_cap = True
                break
            n += _SWEEP_STEP
        swept = sorted(medians)
        for error_target in spec.error_targets:
            best = min(swept, key=lambda nn: (abs(medians[nn] - error_target), nn))
            rows.append(
                FunctionClassRow(float(k), float(error_target), best, medians[best], hit_cap)
            )
    return rows


def run_method_comparison(spec: ExperimentSpec, threads: int = 1) -> list[TrialRecord]:
    """Monte Carlo vs one-stage vs truncated two-stage on identical draws.

    First-stage target integration uses target sampling rather than
    quadrature, putting all methods on the same sampling-noise footing (an
    exact first stage would hide the two-stage estimator's variance cost
    under no shift).  One target draw per calibration point (m defaults to
    n/2), so both of its stages carry matched sampling resolution.
    """
    mus = spec.mu_list if spec.mu_list is not None else (0.2, 0.4, 0.6)
    f = SinFamily(16.0)
    source = TruncatedNormal(0, 1, 0.2, 0.3)
    regressor = spec.regressor if spec.regressor is not None else Linear(degree=1)
    draws = spec.m if spec.m is not None else max(spec.n // 2, 1)
    records = []
    for p_idx, mu in enumerate(mus):
        target = TruncatedNormal(0, 1, float(mu), 0.3)
        pair = SourceTargetPair(source, target)
        truth = truth_oracle(f, target, spec.q)
        B = pair.sup_ratio()
        config = EstimatorConfig(
            q=spec.q,
            threshold=0.75 * B if spec.threshold is None else spec.threshold,
            target_integration=MonteCarlo(draws),
            regressor=regressor,
        )
        config_one = EstimatorConfig(
            q=spec.q, target_integration=MonteCarlo(draws), regressor=regressor
        )

        def body(rep, mu=mu, p_idx=p_idx, pair=pair, truth=truth, config=config, config_one=config_one):
            rng = _rep_stream(spec.base_seed, spec.study, p_idx, rep)
            xs = source.sample(spec.n, rng)[:, 0]
            data = LabeledDataset(xs, f(xs))
            mc = estimate_mc(data, pair.likelihood_ratio(xs), spec.q)
            one = estimate_one_stage(data, pair.target, config_one, rng)
            two = estimate_two_stage_known(data, pair, config, rng)
            return [
                _record(spec.study, mu, mc.kind, rep, mc.value, truth),
                _record(spec.study, mu, one.kind, rep, one.value, truth),
                _record(spec.study, mu, two.kind, rep, two.value, truth),
            ]

        for batch in _map_reps(body, spec.repetitions, threads):
            records.extend(batch)
    return records


def run_truncation_study(spec: ExperimentSpec, threads: int = 1) -> list[TrialRecord]:
    """Two-stage estimator with and without weight truncation, same draws."""
    mus = spec.mu_list if spec.mu_list is not None else (0.4, 0.6, 0.8)
    f = SinFamily(16.0)
    source = TruncatedNormal(0, 1, 0.2, 0.3)
    regressor = spec.regressor if spec.regressor is not None else RandomForest()
    records = []
    for p_idx, mu in enumerate(mus):
        target = TruncatedNormal(0, 1, float(mu), 0.3)
        pair = SourceTargetPair(source, target)
        truth = truth_oracle(f, target, spec.q)
        T = spec.threshold if spec.threshold is not None else pair.sup_ratio() / 2
        plain = EstimatorConfig(q=spec.q, regressor=regressor)
        capped = EstimatorConfig(q=spec.q, threshold=T, regressor=regressor)

        def body(rep, mu=mu, p_idx=p_idx, pair=pair, truth=truth, plain=plain, capped=capped):
            seed = np.random.SeedSequence(
                spec.base_seed, spawn_key=(_STUDY_ID[spec.study], p_idx, rep)
            )
            rng = np.random.default_rng(seed)
            xs = source.sample(spec.n, rng)[:, 0]
            data = LabeledDataset(xs, f(xs))
            # Twin streams: both estimator variants see the identical split
            # and forest, so truncation is the only difference.
            rng_a = np.random.default_rng(seed)
            rng_b = np.random.default_rng(seed)
            est_plain = estimate_two_stage_known(data, pair, plain, rng_a)
            est_capped = estimate_two_stage_known(data, pair, capped, rng_b)
            return [
                _record(spec.study, mu, est_plain.kind, rep, est_plain.value, truth),
                _record(spec.study, mu, est_capped.kind, rep, est_capped.value, truth),
            ]

        for batch in _map_reps(body, spec.repetitions, threads):
            records.extend(batch)
    return records


# --- CSV protocol -----------------------------------------------------------


def load_table(path) -> tuple[np.ndarray, np.ndarray, list]:
    """Read a feature+response CSV with a header row, with diagnostics.

    Returns (features, responses, column names); the response is the last
    column.
    """
    path = Path(path)
    if not path.exists():
        raise InputDataError(f"input file not found: {path}")
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise InputDataError(f"{path}: empty file, expected a header row") from None
        if len(header) < 2:
            raise InputDataError(
                f"{path}: header has {len(header)} column(s), need at least one feature and a response"
            )
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
    if len(rows) < 10:
        raise InputDataError(f"{path}: only {len(rows)} data rows, need at least 10")
    table = np.asarray(rows, dtype=float)
    return table[:, :-1], table[:, -1], header


def _standardize_unit_cube(features: np.ndarray) -> np.ndarray:
    lo = features.min(axis=0)
    hi = features.max(axis=0)
    span = hi - lo
    out = np.empty_like(features)
    for j in range(features.shape[1]):
        # A constant column carries no information; park it mid-cube.
        out[:, j] = 0.5 if span[j] == 0 else (features[:, j] - lo[j]) / span[j]
    return out


def run_csv_protocol(spec: ExperimentSpec, threads: int = 1) -> list[TrialRecord]:
    """Shift-resampling evaluation protocol on a user-supplied table.

    Per replication: split rows 50/30/20 into train/test/classifier pools,
    tilt-resample the test pool with probabilities proportional to
    exp(x' beta) to form the shifted set, and score three estimators
    against the shifted-set truth mean(y^q).
    """
    if spec.csv_path is None:
        raise ConfigurationError("the csv protocol needs csv_path")
    X_raw, ys, _header = load_table(spec.csv_path)
    X = _standardize_unit_cube(X_raw)
    N, d = X.shape
    beta = np.zeros(d) if spec.beta is None else np.asarray(spec.beta, dtype=float)
    if beta.shape != (d,):
        raise ConfigurationError(
            f"beta has length {beta.size}, expected {d} (one per feature column)"
        )
    regressor = spec.regressor if spec.regressor is not None else RandomForest()
    rule = spec.threshold_rule if spec.threshold_rule != "none" else "threeQuarterB"
    n_train = int(round(0.5 * N))
    n_test = int(round(0.3 * N))

    def body(rep):
        rng = _rep_stream(spec.base_seed, spec.study, 0, rep)
        perm = rng.permutation(N)
        idx_train = perm[:n_train]
        idx_test = perm[n_train:n_train + n_test]
        idx_cls = perm[n_train + n_test:]

        tilt = np.exp(X[idx_test] @ beta)
        probs = tilt / tilt.sum()
        idx_shift = rng.choice(idx_test, size=idx_test.size, replace=True, p=probs)
        truth = float(np.mean(ys[idx_shift] ** spec.q))

        shifted = UnlabeledDataset(X[idx_shift])
        labeled_pool = np.concatenate([idx_train, idx_cls])
        prop = fit_propensity(
            UnlabeledDataset(X[labeled_pool]), shifted, spec.feature_degree, rng
        )
        train = LabeledDataset(X[idx_train], ys[idx_train])
        w_train = ratio_at(prop, train.xs)

        mc = estimate_mc(train, w_train, spec.q)

        model_all = fit_regressor(regressor, train, rng)
        one_value = float(np.mean(model_all.predict(shifted.xs) ** spec.q))

        if spec.threshold is not None:
            T = spec.threshold
        elif rule == "theory":
            T = suggest_threshold(train.n, _THEORY_S, _THEORY_P, spec.q, d, spec.alpha)
        else:
            w_max = float(np.max(w_train))
            T = w_max / 2 if rule == "halfB" else 0.75 * w_max
        plug_cfg = EstimatorConfig(q=spec.q, threshold=T, regressor=regressor)
        plug = estimate_two_stage_plugin(train, shifted, plug_cfg, prop, rng)

        return [
            _record(spec.study, 0.0, mc.kind, rep, mc.value, truth),
            _record(spec.study, 0.0, "one_stage", rep, one_value, truth),
            _record(spec.study, 0.0, plug.kind, rep, plug.value, truth),
        ]

    records = []
    for batch in _map_reps(body, spec.repetitions, threads):
        records.extend(batch)
    return records


RUNNERS = {
    "shift_intensity": run_shift_intensity,
    "sampling_strategy": run_sampling_strategy,
    "function_class": run_function_class,
    "method_comparison": run_method_comparison,
    "truncation_study": run_truncation_study,
    "csv_protocol": run_csv_protocol,
}


def run_experiment(spec: ExperimentSpec, threads: int = 1):
    """Dispatch to the study runner; returns (records, metadata)."""
    start = time.perf_counter()
    result = RUNNERS[spec.study](spec, threads)
    metadata = study_metadata(spec)
    metadata["wall_time_seconds"] = time.perf_counter() - start
    if spec.study == "function_class":
        metadata["hit_cap"] = any(row.hit_cap for row in result)
        records = function_class_records(result)
    else:
        records = result
    return records, metadata


def function_class_records(rows: list[FunctionClassRow]) -> list[TrialRecord]:
    """Flatten sweep rows into the tabular schema.

    estimate holds the selected sample size and truth the error target; the
    abs_error column records how far the achieved median error sat from the
    target.
    """
    return [
        TrialRecord(
            "function_class", row.k, "required_n", 0,
            float(row.required_n), row.error_target,
            abs(row.median_error - row.error_target),
        )
        for row in rows
    ]


def study_metadata(spec: ExperimentSpec) -> dict:
    """Spec echo plus per-parameter shift diagnostics (B, density bounds)."""
    per_param = {}
    if spec.study in ("shift_intensity", "method_comparison", "truncation_study"):
        defaults = {
            "shift_intensity": (0.2, 0.4, 0.6, 0.8),
            "method_comparison": (0.2, 0.4, 0.6),
            "truncation_study": (0.4, 0.6, 0.8),
        }
        mus = spec.mu_list if spec.mu_list is not None else defaults[spec.study]
        source = TruncatedNormal(0, 1, 0.2, 0.3)
        for mu in mus:
            pair = SourceTargetPair(source, TruncatedNormal(0, 1, float(mu), 0.3))
            lo, hi = density_bounds(source)
            per_param[repr(float(mu))] = {"B": pair.sup_ratio(), "b_lower": lo, "b_upper": hi}
    elif spec.study == "sampling_strategy":
        for a in spec.a_list:
            source = PolyFamily(float(a))
            pair = SourceTargetPair(source, Uniform())
            lo, hi = density_bounds(source)
            per_param[repr(float(a))] = {"B": pair.sup_ratio(), "b_lower": lo, "b_upper": hi}
    elif spec.study == "function_class":
        pair = SourceTargetPair(Uniform(), TruncatedNormal(0, 1, 0.6, 0.6))
        lo, hi = density_bounds(Uniform())
        for k in spec.k_list:
            per_param[repr(float(k))] = {"B": pair.sup_ratio(), "b_lower": lo, "b_upper": hi}
    return {"spec": spec.to_json(), "per_param": per_param, "version": __version__}


# --- tabular output ---------------------------------------------------------


def _format_value(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_records(records, path) -> None:
    """Write trial records as CSV: UTF-8, '.' decimal, '\\n' line ends."""
    lines = [CSV_HEADER]
    for r in records:
        lines.append(
            f"{r.study},{_format_value(r.param)},{r.method},{r.rep},"
            f"{_format_value(r.estimate)},{_format_value(r.truth)},{_format_value(r.abs_error)}"
        )
    Path(path).write_bytes(("\n".join(lines) + "\n").encode("utf-8"))


def metadata_path(csv_path) -> Path:
    path = Path(csv_path)
    return path.with_suffix(".meta.json") if path.suffix == ".csv" else Path(str(path) + ".meta.json")


def write_metadata(metadata: dict, csv_path) -> Path:
    target = metadata_path(csv_path)
    target.write_text(json.dumps(metadata, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return target
