"""Exception types raised across the package."""


class LffError(Exception):
    """Base class for all package errors."""


class FormatError(LffError, ValueError):
    """Malformed file header or container."""


class UnsupportedFormatError(FormatError):
    """Well-formed file using an encoding this package does not read."""


class EmptyInputError(LffError, ValueError):
    pass


class TooShortError(LffError, ValueError):
    """Signal shorter than the analysis window or segment it must fill."""


class ShapeError(LffError, ValueError):
    pass


class DomainError(LffError, ValueError):
    """Argument outside its mathematical domain (e.g. frequency above Nyquist)."""


class ConfigError(LffError, ValueError):
    pass


class InvariantError(LffError, RuntimeError):
    """An internal consistency check failed; indicates a bug, not bad input."""
