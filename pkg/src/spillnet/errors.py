"""Exception types shared across the pipeline, mapped to CLI exit codes."""


class SpillnetError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(SpillnetError):
    """Invalid or missing configuration (CLI exit code 2)."""


class DataError(SpillnetError):
    """Unusable input data: missing files, malformed content, empty results (exit code 3)."""


class NumericalError(SpillnetError):
    """Estimation or decomposition failure (exit code 4)."""


class CollinearWindowError(NumericalError):
    """The regressor matrix of a VAR window is rank deficient."""


class DegenerateVariableError(NumericalError):
    """A variable has non-positive innovation variance or zero forecast-error variance."""
