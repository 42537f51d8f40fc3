"""Exception hierarchy. Every library error derives from FracflowError."""


class FracflowError(Exception):
    pass


class DimensionMismatchError(FracflowError, ValueError):
    pass


class DomainError(FracflowError, ValueError):
    """An argument lies outside the operator's or law's domain."""


class DegenerateLawError(DomainError):
    """Density requested for the deterministic alpha = 1 subordinator."""


class OrderError(DomainError):
    """Fractional order outside the admissible range of an operator."""


class InstabilityError(DomainError):
    """Negative directional speed u.theta_l; the advection symbol would grow."""


class UnsupportedDirectionError(FracflowError, ValueError):
    pass


class QuadratureError(FracflowError, RuntimeError):
    pass


class TruncationError(FracflowError, RuntimeError):
    pass


class CoverageError(FracflowError, ValueError):
    pass
