"""Exception hierarchy for the figure renderer and its command line tool."""


class FigureError(Exception):
    """Base class for all renderer-specific errors."""


class ConfigurationError(FigureError):
    """A figure spec field or CLI flag is invalid (exit code 2)."""


class InputDataError(FigureError):
    """The input CSV file is missing or malformed (exit code 3)."""


class SchemaError(FigureError):
    """The input table lacks a required column or has no usable rows (exit code 3)."""


class OutputExistsError(FigureError):
    """The output path is already occupied and --force was not given (exit code 1)."""
