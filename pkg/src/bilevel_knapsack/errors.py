"""Exception hierarchy shared by the solvers and the command line front end."""


class KnapsackError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1


class InputError(KnapsackError, ValueError):
    """Malformed or out-of-range input (bad instance, bad capacity, ...)."""

    exit_code = 2


class CapabilityError(KnapsackError):
    """The requested model cannot be handled (unsupported or over budget)."""

    exit_code = 3


class BudgetExceeded(CapabilityError):
    """An enumeration budget was exceeded."""


class InvariantViolation(KnapsackError, AssertionError):
    """An internal consistency check failed; indicates a bug."""

    exit_code = 4
