"""Exception hierarchy shared by the solvers, diagnostics and CLI."""


class CrossDiffError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(CrossDiffError, ValueError):
    """One or more configuration or input invariants are violated.

    ``fields`` lists the offending names so callers can report all of them at once.
    """

    def __init__(self, message, fields=()):
        super().__init__(message)
        self.fields = tuple(fields)


class ParseError(CrossDiffError):
    def __init__(self, message, line=None, column=None):
        loc = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + loc)
        self.line = line
        self.column = column


class InvalidNError(ValidationError):
    pass


class NonConvergenceError(CrossDiffError):
    """A fixed-point iteration hit its iteration cap.

    For the particle scheme this usually means dt is too large relative to
    epsilon**2.
    """

    def __init__(self, message, iterations=None, step=None):
        super().__init__(message)
        self.iterations = iterations
        self.step = step


class SolverFailure(CrossDiffError):
    pass


class SingularSystemError(SolverFailure):
    pass


class GridMismatchError(CrossDiffError, ValueError):
    pass


class NegativeInputError(CrossDiffError, ValueError):
    pass
