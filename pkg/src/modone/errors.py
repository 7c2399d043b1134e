"""Exception types shared across the package."""


class ModOneError(Exception):
    """Base class for all package errors."""


class InvalidArgument(ModOneError, ValueError):
    pass


class NumericFailure(ModOneError, ArithmeticError):
    pass


class ResourceLimit(ModOneError, RuntimeError):
    """Raised when a lattice enumeration would exceed its cell budget."""


class FlowRangeError(ModOneError, OverflowError):
    pass


class SingularInput(ModOneError, ZeroDivisionError):
    """A singular test function was evaluated at its pole."""
