"""Exception hierarchy shared across the library and the command line tool."""


class ShiftMomentError(Exception):
    """Base class for all library-specific errors."""


class ConfigurationError(ShiftMomentError):
    """A parameter, spec, or config file is invalid (CLI exit code 2)."""


class InputDataError(ShiftMomentError):
    """User-supplied data (CSV files, datasets) is malformed (CLI exit code 3)."""


class DomainError(ShiftMomentError):
    """A point lies outside the unit cube the densities are defined on."""


class DegeneratePairError(ShiftMomentError):
    """The source density vanishes where the likelihood ratio is needed."""
