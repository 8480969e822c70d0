"""Deterministic figure rendering for moment-estimation results tables."""

__version__ = "0.1.0"

from .errors import (
    ConfigurationError,
    FigureError,
    InputDataError,
    OutputExistsError,
    SchemaError,
)
from .renderer import (
    KINDS,
    SCHEMA,
    FigureSpec,
    RenderReport,
    ResultRow,
    read_results,
    render,
)

__all__ = [
    "__version__",
    "ConfigurationError",
    "FigureError",
    "InputDataError",
    "OutputExistsError",
    "SchemaError",
    "KINDS",
    "SCHEMA",
    "FigureSpec",
    "RenderReport",
    "ResultRow",
    "read_results",
    "render",
]
