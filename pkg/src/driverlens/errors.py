"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: ConfigError -> 1 (usage),
DataError -> 2 (bad input data), anything else -> 3 (internal).
"""


class DriverlensError(Exception):
    """Base class for errors raised by this package."""


class ConfigError(DriverlensError):
    """Invalid configuration. The message lists every violation found."""


class DataError(DriverlensError):
    """Malformed or degenerate input data (parse errors, missing columns...)."""
