"""Exception hierarchy shared by every app.

Each error carries the process exit code the management commands map it to:
2 usage/config, 3 data, 4 I/O.
"""


class TappingError(Exception):
    """Base class for errors raised by the classifier pipeline."""
    exit_code = 1


class ShapeError(TappingError, ValueError):
    """Array shapes or widths do not fit together."""
    exit_code = 2


class ParameterError(TappingError, ValueError):
    """A hyperparameter or argument is outside its allowed range."""
    exit_code = 2


class ConfigError(TappingError):
    """The run configuration is invalid or inconsistent with its inputs."""
    exit_code = 2


class DataError(TappingError, ValueError):
    """Input data is malformed, out of range or insufficient."""
    exit_code = 3


class LoadError(TappingError):
    """A stored artifact cannot be read back."""
    exit_code = 4
