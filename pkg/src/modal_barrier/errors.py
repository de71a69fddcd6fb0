"""Exception types shared across the package.

The CLI maps each class to an exit status, so library code should raise the
most specific one that applies.
"""


class ModalBarrierError(Exception):
    """Base class for all package errors."""

    exit_code = 1
    module = "modal_barrier"


class ValidationError(ModalBarrierError, ValueError):
    """Bad input: malformed files, out-of-range parameters, inconsistent shapes."""

    exit_code = 1

    def __init__(self, message, module=None):
        super().__init__(message)
        if module is not None:
            self.module = module


class NumericalError(ModalBarrierError, ArithmeticError):
    """A numeric routine failed to converge or hit a degenerate case."""

    exit_code = 3

    def __init__(self, message, module=None):
        super().__init__(message)
        if module is not None:
            self.module = module
