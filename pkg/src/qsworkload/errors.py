"""Exception and warning types shared across the package."""


class QsError(Exception):
    """Base class for all package errors."""


class ModelError(QsError, ValueError):
    """Structurally invalid model parameters or model document."""


class DomainError(QsError, ValueError):
    """Argument outside the finiteness/analyticity domain of a transform."""


class AssumptionViolation(QsError):
    """A standing assumption (stability, strictly negative minimum) fails."""


class StabilityError(AssumptionViolation):
    """The drift condition E X(1) < 0 does not hold."""


class BelowSingularity(DomainError):
    """Real argument left of the dominant singularity; no real inverse exists."""


class ConvergenceError(QsError, RuntimeError):
    """An iterative solver did not reach its tolerance."""


class PoleError(QsError, ZeroDivisionError):
    """Evaluation hit a genuine pole of a transform."""


class OscillationError(QsError, RuntimeError):
    """Numerical inversion failed its internal consistency check."""


class FitError(QsError, RuntimeError):
    """Singular-expansion fit produced inconsistent coefficients."""


class ParameterError(QsError, ValueError):
    """Invalid parameters for a closed-form law."""


class ConfigError(QsError, ValueError):
    """Invalid simulation configuration."""


class EmptySample(QsError, ValueError):
    """Statistic requested on an empty sample."""


class BiasWarning(UserWarning):
    """Diffusion grid coarser than recommended."""


class InsufficientDataWarning(UserWarning):
    """Too few surviving paths for a reliable conditional estimate."""


class CapabilityError(QsError):
    """Requested method is not available for this model."""
