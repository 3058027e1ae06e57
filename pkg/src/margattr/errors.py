"""Exception taxonomy shared across the package.

The CLI maps these onto exit codes: configuration/validation problems
exit 1, oracle transport/contract problems exit 2, and engine invariant
violations exit 3.
"""


class MargattrError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(MargattrError):
    """Invalid configuration, file contents, or corpus/vocabulary state."""


class OracleError(MargattrError):
    """Base class for failures of a classifier or likelihood oracle."""


class OracleUnavailableError(OracleError):
    """Remote oracle could not be reached after all retries."""


class ProtocolViolationError(OracleError):
    """Remote oracle replied with a malformed or misaligned body."""


class InvalidDistributionError(OracleError):
    """Oracle returned a distribution violating its invariants."""


class EngineError(MargattrError):
    """Attribution computation hit an internal invariant violation."""
