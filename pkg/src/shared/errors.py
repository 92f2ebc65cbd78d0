class CFMError(Exception):
    """Base class for every error raised by the toolkit."""
    def __init__(self, message):
        super().__init__(message)


class DatasetParseError(CFMError):
    """Raised when a CSV row cannot be parsed."""
    def __init__(self, message, line_number=None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class EmptyDatasetError(CFMError):
    """Raised when a dataset has no samples left."""


class ContractError(CFMError):
    """Raised when an operation's precondition is violated."""


class ForceDomainError(CFMError):
    """Raised when a force is not strictly positive and its logarithm is undefined."""


class UnderdeterminedFitError(CFMError):
    """Raised when there are fewer samples than independent regressors."""


class EliminationError(CFMError):
    """Raised when a refit fails during stepwise elimination."""
    def __init__(self, message, term=None):
        super().__init__(message)
        self.term = term


class InfeasibleSpeedError(CFMError):
    """Raised when the force limit is exceeded even as the velocity approaches zero."""


class VelocityIndependentModelError(CFMError):
    """Raised when a model has no velocity terms to invert."""


class ReachabilityError(CFMError):
    """Raised when an inverse-kinematics target lies outside the arm's reach."""
    def __init__(self, message, deficit_m=0.0):
        super().__init__(message)
        self.deficit_m = deficit_m


class InsufficientTraceError(CFMError):
    """Raised when a force trace does not cover the transient window."""


class ModelFormatError(CFMError):
    """Raised when a serialized model or arm description is malformed."""
