"""Moment estimation under covariate shift.

The package estimates the q-th moment of an unknown function under a target
distribution from labeled source-distribution samples, via importance
weighting with a fitted regression model as a control variate, optional
weight truncation, and classifier-based likelihood-ratio estimation.
"""

__version__ = "0.1.0"

from .distributions import (
    Density,
    PolyFamily,
    ProductDensity,
    SourceTargetPair,
    Tabulated,
    TruncatedNormal,
    Uniform,
    density_bounds,
    density_from_json,
)
from .errors import (
    ConfigurationError,
    DegeneratePairError,
    DomainError,
    InputDataError,
    ShiftMomentError,
)
from .estimators import (
    EstimatorConfig,
    MomentEstimate,
    MonteCarlo,
    Quadrature,
    estimate_mc,
    estimate_one_stage,
    estimate_two_stage_known,
    estimate_two_stage_plugin,
    split,
    target_moment_of_model,
)
from .ratio import (
    PropensityModel,
    UnlabeledDataset,
    fit_propensity,
    propensity_model_from_json,
    ratio_at,
    ratio_from_propensity,
    suggest_threshold,
    theoretical_rate,
    truncate,
)
from .regressors import (
    CallableModel,
    FittedRegressor,
    LabeledDataset,
    Linear,
    MovingLeastSquares,
    RandomForest,
    covering_radius,
    fit,
    regressor_from_json,
)
from .experiments import (
    Custom,
    ExperimentSpec,
    FunctionClassRow,
    SinFamily,
    TrialRecord,
    experiment_spec_from_json,
    load_table,
    run_csv_protocol,
    run_experiment,
    run_function_class,
    run_method_comparison,
    run_sampling_strategy,
    run_shift_intensity,
    run_truncation_study,
    truth_oracle,
    write_metadata,
    write_records,
)

__all__ = [
    "Density",
    "Uniform",
    "TruncatedNormal",
    "PolyFamily",
    "Tabulated",
    "ProductDensity",
    "SourceTargetPair",
    "density_bounds",
    "density_from_json",
    "ShiftMomentError",
    "ConfigurationError",
    "InputDataError",
    "DomainError",
    "DegeneratePairError",
    "LabeledDataset",
    "Linear",
    "MovingLeastSquares",
    "RandomForest",
    "FittedRegressor",
    "CallableModel",
    "fit",
    "regressor_from_json",
    "covering_radius",
    "UnlabeledDataset",
    "PropensityModel",
    "fit_propensity",
    "propensity_model_from_json",
    "ratio_at",
    "ratio_from_propensity",
    "truncate",
    "suggest_threshold",
    "theoretical_rate",
    "EstimatorConfig",
    "MomentEstimate",
    "Quadrature",
    "MonteCarlo",
    "split",
    "target_moment_of_model",
    "estimate_mc",
    "estimate_one_stage",
    "estimate_two_stage_known",
    "estimate_two_stage_plugin",
    "Custom",
    "ExperimentSpec",
    "FunctionClassRow",
    "SinFamily",
    "TrialRecord",
    "experiment_spec_from_json",
    "load_table",
    "run_csv_protocol",
    "run_experiment",
    "run_function_class",
    "run_method_comparison",
    "run_sampling_strategy",
    "run_shift_intensity",
    "run_truncation_study",
    "truth_oracle",
    "write_metadata",
    "write_records",
]
