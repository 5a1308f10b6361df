"""Exception types shared across the package."""


class ScatterError(Exception):
    """Base class for all package errors."""


class DomainError(ScatterError, ValueError):
    """An argument lies outside the domain where the quantity is defined."""


class EvaluationError(ScatterError, ArithmeticError):
    """A user-supplied function returned a non-finite value.

    The offending abscissa is kept in ``x``.
    """

    def __init__(self, x, value=None):
        self.x = x
        self.value = value
        super().__init__(f"non-finite function value {value!r} at x={x!r}")


class TransmissionSingularityError(ScatterError, ArithmeticError):
    """M22 vanishes: the full-line problem itself is singular at this k."""


class SpectralSingularityAtRealK(ScatterError, ArithmeticError):
    """The half-line reflection amplitude diverges at a real wavenumber.

    Physically the lasing (spectral singularity) condition is met.
    """

    def __init__(self, k, message=None):
        self.k = k
        super().__init__(message or f"half-line reflection amplitude diverges at k={k!r}")


class ConvergenceError(ScatterError, RuntimeError):
    """An iterative solver did not converge. ``trace`` holds the iterates."""

    def __init__(self, message, trace=None):
        self.trace = list(trace) if trace is not None else []
        super().__init__(message)
