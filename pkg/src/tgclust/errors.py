"""Exception types shared across the toolkit."""


class DataError(ValueError):
    """Raised when input data violates a contract (bad files, degenerate
    series, insufficient overlap, unknown tickers). Maps to exit code 2."""


class UsageError(Exception):
    """Raised for bad command-line or config values. Maps to exit code 1."""
