"""Exception types shared across the package."""


class DataError(ValueError):
    """Invalid or inconsistent input data (bad feed, bad CSV, bad geometry).

    CLI maps this to exit code 1.
    """


class ConfigError(Exception):
    """Invalid run configuration file or missing configured paths.

    CLI maps this to exit code 2.
    """
