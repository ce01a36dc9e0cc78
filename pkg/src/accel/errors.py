"""Exception types shared across the package."""


class AccelError(Exception):
    """Base class for all package errors."""


class InputError(AccelError, ValueError):
    """Bad argument: wrong shape, out-of-range parameter, non-finite data."""


class FormatError(AccelError, ValueError):
    """Malformed file contents (CSV, JSON problem or config)."""


class StateError(AccelError, RuntimeError):
    """Operation not valid for the current object state."""


class NumericError(AccelError, ArithmeticError):
    """Non-finite value produced during iteration."""
