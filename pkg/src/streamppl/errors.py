"""Exception hierarchy shared across the compiler and the inference runtimes."""


class StreampplError(Exception):
    """Base class for all errors raised by this package."""


class SourceError(StreampplError):
    """An error attached to a source location."""

    def __init__(self, message, line=None, col=None):
        self.line = line
        self.col = col
        if line is not None:
            message = f"{line}:{col if col is not None else '?'}: {message}"
        super().__init__(message)


class ParseError(SourceError):
    pass


class UnboundVariableError(SourceError):
    pass


class DuplicateNameError(SourceError):
    pass


class KindError(SourceError):
    """A probabilistic construct used in a deterministic context (or vice versa)."""


class TypeMismatchError(SourceError):
    pass


class ScheduleCycleError(SourceError):
    """An instantaneous dependency cycle that no equation order can satisfy."""


class EvalError(StreampplError):
    pass


class UninitializedReadError(EvalError):
    """A nil initialization value reached an operation that needs a real value."""


class ShapeError(EvalError):
    """A state tree did not match the skeleton expected by a transition function."""


class DensityUnavailableError(StreampplError):
    """log_pdf requested on a distribution that has no density."""


class UnsupportedMomentError(StreampplError):
    pass


class DegenerateCloudError(StreampplError):
    """Every particle of a cloud carries weight -inf."""


class NoClosedFormError(StreampplError):
    """A symbolic expression has no closed-form distribution."""


class ContinuousSampleError(StreampplError):
    """Exhaustive enumeration hit a sample site without finite support."""


class EnumBudgetError(StreampplError):
    """Exhaustive enumeration exceeded its execution-path budget."""


class ConvergenceError(StreampplError):
    """An iterative solver ran out of its iteration budget."""
