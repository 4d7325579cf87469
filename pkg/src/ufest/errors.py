"""Exception hierarchy shared by every module."""


class UfestError(Exception):
    """Base class for all errors raised by ufest."""


class DimensionCapError(UfestError, ValueError):
    """A dense object would exceed the configured desk-scale size limit."""


class NotUnitaryError(UfestError, ValueError):
    pass


class NumericalError(UfestError, RuntimeError):
    """A numerical routine failed or produced an unusable result."""


class IllConditionedError(NumericalError):
    pass


class IntertwinerError(NumericalError):
    pass


class IndeterminateError(UfestError):
    """A Monte-Carlo decision lies too close to its threshold to call.

    ``estimate`` and ``threshold`` describe the offending comparison.
    """

    def __init__(self, message, estimate=None, threshold=None):
        super().__init__(message)
        self.estimate = estimate
        self.threshold = threshold


class BudgetCapError(UfestError):
    """The requested precision needs more shots than the configured cap."""


class McEvaluationError(UfestError):
    """The integrand raised on one Monte-Carlo sample."""

    def __init__(self, message, sample_index, seed, stream_key):
        super().__init__(message)
        self.sample_index = sample_index
        self.seed = seed
        self.stream_key = stream_key
