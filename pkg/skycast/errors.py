"""
Skycast - Errors
Exception hierarchy shared by every module and mapped to CLI exit codes.
"""


class SkycastError(Exception):
    """Base class for all skycast failures."""

    exit_code = 1


class ConfigError(SkycastError, ValueError):
    """Invalid configuration, schema or argument."""

    exit_code = 2


class DataError(SkycastError, ValueError):
    """Input data cannot be parsed or does not satisfy a contract."""

    exit_code = 3


class CheckpointError(DataError):
    """Checkpoint file is truncated, of another version or another config."""


class NumericalError(SkycastError, ArithmeticError):
    """Training diverged or produced non-finite values."""

    exit_code = 4
