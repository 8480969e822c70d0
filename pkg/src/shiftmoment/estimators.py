"""Moment estimators for a function under a shifted target distribution.

Four estimators of E_target[f^q] from source-distribution samples:

* `estimate_mc`: importance sampling with caller-supplied weights.
* `estimate_one_stage`: integrate a model fitted on all the data.
* `estimate_two_stage_known`: fit on one half, calibrate on the other by
  likelihood-ratio-weighted residuals (optionally truncated).
* `estimate_two_stage_plugin`: the same calibration with an estimated
  ratio and a sample-mean first stage; always truncated.

Every estimate decomposes as value = first_stage_term + calibration_term
and carries its split sizes and truncation diagnostics.  Estimators are
pure functions of (data, config, random stream): the stream is consumed
in a fixed order (split, then fit, then target integration).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .distributions import Density, SourceTargetPair
from .errors import ConfigurationError, DomainError
from .ratio import PropensityModel, UnlabeledDataset, ratio_at, truncate
from .regressors import FittedRegressor, LabeledDataset, RandomForest, RegressorSpec
from .regressors import fit as fit_regressor


@dataclass(frozen=True)
class Quadrature:
    """Gauss-Legendre target integration with `nodes` points per axis."""

    nodes: int = 256

    def __post_init__(self):
        if self.nodes < 16:
            raise ConfigurationError(f"quadrature needs at least 16 nodes, got {self.nodes}")


@dataclass(frozen=True)
class MonteCarlo:
    """Target integration by the mean over fresh target draws."""

    draws: int

    def __post_init__(self):
        if self.draws < 1:
            raise ConfigurationError(f"monte carlo integration needs draws >= 1, got {self.draws}")


TargetIntegration = Quadrature | MonteCarlo


@dataclass(frozen=True)
class EstimatorConfig:
    q: int
    split_fraction: float = 0.5
    threshold: float | None = None
    target_integration: TargetIntegration = Quadrature()
    regressor: RegressorSpec = field(default_factory=RandomForest)

    def __post_init__(self):
        if not (isinstance(self.q, (int, np.integer)) and self.q >= 1):
            raise ConfigurationError(f"moment order q must be a positive integer, got {self.q}")
        if not 0.0 < self.split_fraction < 1.0:
            raise ConfigurationError(
                f"split fraction must be in (0,1), got {self.split_fraction}"
            )
        if self.threshold is not None and not self.threshold > 0:
            raise ConfigurationError(f"threshold must be positive, got {self.threshold}")


@dataclass(frozen=True)
class MomentEstimate:
    value: float
    kind: str
    diagnostics: dict

    def to_json(self) -> dict:
        diag = {}
        for key, value in self.diagnostics.items():
            if value is None:
                diag[key] = None
            elif key in ("n1", "n2"):
                diag[key] = int(value)
            else:
                diag[key] = float(value)
        return {"kind": self.kind, "value": float(self.value), "diagnostics": diag}


def _make_estimate(kind, first_stage, calibration, n1, n2, truncation_fraction, threshold):
    diagnostics = {
        "n1": int(n1),
        "n2": int(n2),
        "truncation_fraction": float(truncation_fraction),
        "threshold_used": None if threshold is None else float(threshold),
        "first_stage_term": float(first_stage),
        "calibration_term": float(calibration),
    }
    return MomentEstimate(float(first_stage) + float(calibration), kind, diagnostics)


def split(
    data: LabeledDataset, fraction: float, rng: np.random.Generator
) -> tuple[LabeledDataset, LabeledDataset]:
    """Uniformly random partition with |S1| = round(fraction * n)."""
    if data.n < 2:
        raise ConfigurationError(f"need at least 2 samples to split, got {data.n}")
    if not 0.0 < fraction < 1.0:
        raise ConfigurationError(f"split fraction must be in (0,1), got {fraction}")
    # Half-up rounding, clamped so both halves stay nonempty.
    n1 = int(np.floor(fraction * data.n + 0.5))
    n1 = min(max(n1, 1), data.n - 1)
    perm = rng.permutation(data.n)
    return data.subset(perm[:n1]), data.subset(perm[n1:])


def target_moment_of_model(
    model: FittedRegressor,
    target: Density,
    q: int,
    method: TargetIntegration = Quadrature(),
    rng: np.random.Generator | None = None,
) -> float:
    """E_target[model(X)^q], by quadrature against the density or by sampling."""
    if isinstance(method, MonteCarlo):
        if rng is None:
            raise ConfigurationError("monte carlo target integration needs a random stream")
        draws = target.sample(method.draws, rng)
        return float(np.mean(model.predict(draws) ** q))
    t, u = np.polynomial.legendre.leggauss(method.nodes)
    axis_nodes = 0.5 * (t + 1.0)
    axis_weights = 0.5 * u
    if target.dim == 1:
        points = axis_nodes[:, None]
        weights = axis_weights
    else:
        mesh = np.meshgrid(*([axis_nodes] * target.dim), indexing="ij")
        points = np.column_stack([m.ravel() for m in mesh])
        wmesh = np.meshgrid(*([axis_weights] * target.dim), indexing="ij")
        weights = np.prod(np.stack([m.ravel() for m in wmesh]), axis=0)
    return float(np.sum(weights * model.predict(points) ** q * target.pdf(points)))


def estimate_mc(data: LabeledDataset, weights, q: int) -> MomentEstimate:
    """Importance-sampling baseline (1/n) sum w_i y_i^q."""
    w = np.asarray(weights, dtype=float).ravel()
    if w.shape[0] != data.n:
        raise ConfigurationError(f"{w.shape[0]} weights for {data.n} samples")
    if w.size and w.min() < 0:
        raise DomainError("importance weights must be nonnegative")
    value = float(np.mean(w * data.ys**q))
    return _make_estimate("mc", 0.0, value, 0, data.n, 0.0, None)


def estimate_one_stage(
    data: LabeledDataset,
    target: Density,
    config: EstimatorConfig,
    rng: np.random.Generator,
) -> MomentEstimate:
    """Fit on all the data and integrate the model against the target."""
    model = fit_regressor(config.regressor, data, rng)
    value = target_moment_of_model(model, target, config.q, config.target_integration, rng)
    return _make_estimate("one_stage", value, 0.0, data.n, 0, 0.0, None)


def _calibration(ws, ys, preds, q, threshold):
    if threshold is None:
        tau = ws
        frac = 0.0
    else:
        tau = truncate(ws, threshold)
        frac = float(np.mean(ws > threshold))
    return float(np.mean(tau * (ys**q - preds**q))), frac


def estimate_two_stage_known(
    data: LabeledDataset,
    pair: SourceTargetPair,
    config: EstimatorConfig,
    rng: np.random.Generator,
    model: FittedRegressor | None = None,
) -> MomentEstimate:
    """Split, fit, and calibrate with the exact likelihood ratio.

    `model` overrides the fitted first stage (the split still happens so
    the calibration half is unchanged); used to inject oracle or
    deliberately wrong models.
    """
    s1, s2 = split(data, config.split_fraction, rng)
    if model is None:
        model = fit_regressor(config.regressor, s1, rng)
    ws = pair.likelihood_ratio(s2.xs)
    calibration, frac = _calibration(ws, s2.ys, model.predict(s2.xs), config.q, config.threshold)
    first = target_moment_of_model(model, pair.target, config.q, config.target_integration, rng)
    kind = "two_stage" if config.threshold is None else "two_stage_trunc"
    return _make_estimate(kind, first, calibration, s1.n, s2.n, frac, config.threshold)


def estimate_two_stage_plugin(
    labeled: LabeledDataset,
    unlabeled: UnlabeledDataset,
    config: EstimatorConfig,
    ratio_model,
    rng: np.random.Generator,
    model: FittedRegressor | None = None,
) -> MomentEstimate:
    """Doubly robust estimator with an estimated ratio.

    The first stage is the model's mean q-th power over the unlabeled
    target sample; the calibration stage weights residuals by the
    truncated estimated ratio.  `ratio_model` is a PropensityModel or any
    callable mapping covariate points to weights.  A truncation level is
    required: the estimated ratio has no a-priori bound.
    """
    if config.threshold is None:
        raise ConfigurationError("the plug-in estimator requires a truncation threshold")
    if unlabeled.n == 0:
        raise ConfigurationError("the plug-in estimator needs unlabeled target points")
    s1, s2 = split(labeled, config.split_fraction, rng)
    if model is None:
        model = fit_regressor(config.regressor, s1, rng)
    if isinstance(ratio_model, PropensityModel):
        ws = ratio_at(ratio_model, s2.xs)
    else:
        ws = np.asarray(ratio_model(s2.xs), dtype=float).ravel() * np.ones(s2.n)
    if ws.min() < 0:
        raise DomainError("estimated ratio produced a negative weight")
    calibration, frac = _calibration(ws, s2.ys, model.predict(s2.xs), config.q, config.threshold)
    first = float(np.mean(model.predict(unlabeled.xs) ** config.q))
    return _make_estimate("plugin", first, calibration, s1.n, s2.n, frac, config.threshold)
