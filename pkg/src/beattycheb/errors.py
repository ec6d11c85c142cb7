"""Exception taxonomy shared by all modules.

Two broad families matter for the CLI exit codes: ValidationError maps to
exit code 2 (bad input, bad config), ResourceError maps to exit code 3
(budget or precision exhaustion).
"""


class BeattyChebError(Exception):
    """Base class for all package errors."""


class ValidationError(BeattyChebError):
    """Invalid argument, parameter combination, or input file."""


class ResourceError(BeattyChebError):
    """A configured budget or precision cap was hit."""


# -- validation ---------------------------------------------------------------

class InvalidRange(ValidationError):
    pass


class InvalidSurd(ValidationError):
    pass


class InvalidDelta(ValidationError):
    pass


class AlphaNotGreaterThanOne(ValidationError):
    pass


class RamifiedPrime(ValidationError):
    pass


class PatternNotClassified(ValidationError):
    """A factorization pattern matched no configured conjugacy class."""


class ContextFormatError(ValidationError):
    """Malformed or non-pattern-separable context file."""


class DigitStreamError(ValidationError):
    pass


class ApproximationNotFound(BeattyChebError):
    """No continued-fraction convergent lands in the requested window."""


class InsufficientPrimes(BeattyChebError):
    pass


class SingularGram(BeattyChebError):
    """Basis numerically dependent; reduce the polynomial degree."""


class ConvergenceFailure(BeattyChebError):
    pass


# -- budgets & precision ------------------------------------------------------

class BudgetExceeded(ResourceError):
    pass


class RangeTooLarge(BudgetExceeded):
    pass


class MemoryBudget(BudgetExceeded):
    pass


class ExponentBudget(BudgetExceeded):
    pass


class PrecisionExhausted(ResourceError):
    """An interval decision could not be certified within the precision cap."""
