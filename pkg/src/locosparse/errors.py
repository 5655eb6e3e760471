"""Exception types shared across the package.

Every error raised deliberately by locosparse derives from
:class:`LocosparseError`, so callers can catch one base type at the CLI
boundary and map it to a nonzero exit code.
"""


class LocosparseError(Exception):
    """Base class for all errors raised by this package."""


class StorageError(LocosparseError):
    """An I/O level problem: missing file, unreadable stream, short read."""


class FormatError(LocosparseError):
    """A byte stream or text file does not match its declared layout."""


class ValidationError(LocosparseError):
    """Well-formed data carrying values that violate a contract."""


class ConfigError(LocosparseError):
    """An invalid configuration value or combination of values."""


class ContractError(LocosparseError):
    """An argument violates a documented precondition."""


class DegenerateInputError(LocosparseError):
    """Input that is structurally valid but has no meaningful answer."""


class DivergenceError(LocosparseError):
    """An iterative routine failed to reach its stopping rule."""


class NumericalError(LocosparseError):
    """A numeric quantity left its legal domain (NaN, Inf, negative norm)."""


class EmptyHistogramError(LocosparseError):
    """A histogram was requested over an empty collection of samples."""
