"""Exception types raised by the library."""


class FourierBVError(Exception):
    """Base class for all library errors."""


class DomainError(FourierBVError):
    """Evaluation requested at a point where the function is not defined."""


class NotBVError(FourierBVError):
    """A piece has unbounded variation on the requested interval."""


class ClassificationError(FourierBVError):
    """Declared tail behavior fails its numerical decay check."""


class DivergentIntegralError(FourierBVError):
    """Tail convergence checks failed; the integral does not settle."""


class CommonDiscontinuityError(FourierBVError):
    """Two integrators share a discontinuity point (product rule hypothesis)."""


class NotACError(FourierBVError):
    """Integrator has jumps or a singular part, so it is not absolutely continuous."""


class DepthError(FourierBVError):
    """Requested recursion depth is out of range."""


class HypothesisError(FourierBVError):
    """Arguments fall outside the hypotheses of the identity being evaluated."""


class SingularityError(FourierBVError):
    """A non-integrable singularity lies inside the integration interval."""


class NotOddError(FourierBVError):
    """Function lacks the odd-symmetry record (or fails the numeric oddness check)."""


class WeightedIntegrabilityError(FourierBVError):
    """The |t - c|-weighted integrability check near the center failed."""


class ZeroFrequencyError(FourierBVError):
    """Function part of a distributional transform evaluated at s = 0."""


class NonConvergenceError(FourierBVError):
    """Limit stages exhausted without settling below tolerance."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class NotFineError(FourierBVError):
    """Tagged partition violates the gauge it was checked against."""


class ParseError(FourierBVError):
    """Function-definition text does not match the grammar."""

    def __init__(self, message, line=1, column=0):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class ValidationError(FourierBVError):
    """Parsed definition violates a model invariant."""
