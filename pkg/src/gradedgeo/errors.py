"""Exception hierarchy shared by every module."""


class GradedError(Exception):
    """Base class for all errors raised by gradedgeo."""


class DimensionError(GradedError, ValueError):
    """Degree lengths, matrix shapes or degree labels do not fit together."""


class DomainError(GradedError, ValueError):
    """An argument lies outside the allowed range (e.g. order > truncation)."""


class ContextError(GradedError, ValueError):
    """Objects living on different charts were combined."""


class DegreeError(GradedError, ValueError):
    """A value does not carry the Z2^n-degree it is required to carry."""


class CapabilityError(GradedError):
    """The requested operation is not supported for this kind of data."""


class SingularityError(GradedError, ArithmeticError):
    """A body (reduced) matrix or linear part is not invertible."""


class NumericError(GradedError, ArithmeticError):
    """Numeric evaluation failed (non-finite value, solver divergence)."""


class ParseError(GradedError, ValueError):
    """Malformed expression text."""

    def __init__(self, message, position=None, text=None):
        self.position = position
        self.text = text
        if position is not None:
            message = f"{message} at position {position}"
        super().__init__(message)


class ResolutionError(ParseError):
    """An identifier does not name a coordinate or registered function."""


class ManifestError(GradedError, ValueError):
    """Manifest failed schema validation or cross-reference checks."""

    def __init__(self, message, path=None):
        self.path = path
        if path:
            message = f"{path}: {message}"
        super().__init__(message)


class RejectedError(GradedError):
    """A construction refused its input; carries the report that justified it."""

    def __init__(self, message, report=None, witness=None):
        self.report = report
        self.witness = witness
        super().__init__(message)
