"""Exception types shared across the package.

The command line maps these to exit codes: ConfigError -> 1,
DataError -> 2, InvariantError -> 3.
"""


class ConfigError(Exception):
    """Bad configuration: unknown key, wrong type, out-of-range value."""


class DataError(Exception):
    """Bad input data: malformed CSV, invalid labels, corrupt frame file."""


class InvariantError(Exception):
    """An internal consistency check failed; indicates a bug, not bad input."""
