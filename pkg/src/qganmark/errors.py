"""Exception hierarchy shared across the package."""


class QganmarkError(Exception):
    """Base class for all package errors."""


class CapacityError(QganmarkError):
    """Requested register size outside the supported 1..12 qubit range."""


class ChannelError(QganmarkError):
    """Kraus operators violate the completeness relation."""


class StateCorruptionError(QganmarkError):
    """A density matrix or probability vector broke its invariants."""


class DegenerateStateError(QganmarkError):
    """Post-selection branch (or a patch) carries no usable probability mass."""


class ProfileError(QganmarkError):
    """Hardware profile with inconsistent or out-of-range calibration values."""


class ParseError(QganmarkError):
    """Malformed input file; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ConfigError(QganmarkError):
    """Invalid experiment configuration (CLI exit code 2)."""


class DataError(QganmarkError):
    """Missing or inconsistent data artifacts (CLI exit code 3)."""
