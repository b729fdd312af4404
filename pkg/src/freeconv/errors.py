"""Exception hierarchy for freeconv."""


class FreeconvError(Exception):
    """Base class for all package errors."""


class DomainError(FreeconvError, ValueError):
    """Input outside the mathematical domain of an operation or parameter."""


class BranchCutError(FreeconvError, ValueError):
    """Evaluation requested on (or too close to) a branch cut."""


class PoleError(FreeconvError, ArithmeticError):
    """Evaluation at a pole (atom position, zero denominator)."""


class ConvergenceError(FreeconvError, RuntimeError):
    """An iterative solve failed to reach its tolerance."""

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class SpecError(FreeconvError, ValueError):
    """Error in a textual measure spec; carries a location when known."""

    def __init__(self, message, line=None, col=None):
        loc = f" (line {line}, col {col})" if line is not None else ""
        super().__init__(message + loc)
        self.line = line
        self.col = col


class SpecSyntaxError(SpecError):
    pass


class SpecSemanticError(SpecError):
    pass
