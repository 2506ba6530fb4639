"""Exception types shared across the toolkit."""


class SemrheoError(Exception):
    """Base class for all toolkit errors."""


class FormatError(SemrheoError):
    """Malformed or truncated input file."""


class DuplicateTokenError(FormatError):
    def __init__(self, token: str):
        super().__init__(f"duplicate token: {token!r}")
        self.token = token


class InvariantError(SemrheoError):
    """A domain-type invariant was violated."""


class DegenerateVectorError(SemrheoError):
    """Zero (or effectively zero) vector where a direction is required."""


class EmptyPoolError(SemrheoError):
    """No candidates left after applying exclusions."""


class InsufficientDataError(SemrheoError):
    """Too few usable points for the requested estimate."""


class EmptyDocumentError(SemrheoError):
    """Document yielded no usable sentences."""


class UnsupportedError(SemrheoError):
    """Requested quantity has no defined value for these parameters."""
