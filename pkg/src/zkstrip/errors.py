"""Exception types raised by the solver and the verification harness."""


class ZKError(Exception):
    """Base class for all package errors."""


class ConfigError(ZKError, ValueError):
    """Invalid geometry, grid or run configuration."""


class DimensionError(ZKError, ValueError):
    """Array shape does not match the geometry it is used with."""


class NumericError(ZKError, ArithmeticError):
    """Non-finite values where finite ones are required."""


class OrderError(ZKError, ValueError):
    """Fractional order outside the range of the requested representation."""


class AccuracyError(ZKError, ArithmeticError):
    """A quadrature did not reach its tolerance."""

    def __init__(self, message, estimate):
        super().__init__(message)
        self.estimate = estimate


class SingularMultiplierError(ZKError, ArithmeticError):
    """The forcing multiplier denominator vanished on a sampled bin."""

    def __init__(self, k, tau):
        super().__init__(f"singular forcing multiplier at k={k}, tau={tau!r}")
        self.k = k
        self.tau = tau


class DivergentSeriesError(ZKError, ArithmeticError):
    """The Neumann series ratio reached modulus one on the resolved band."""

    def __init__(self, k, tau, ratio):
        super().__init__(
            f"Neumann series diverges: |r_k(tau)| = {ratio:.3g} >= 1 at k={k}, tau={tau:.6g}"
        )
        self.k = k
        self.tau = tau
        self.ratio = ratio


class ConvergenceError(ZKError, RuntimeError):
    """Picard iteration failed to contract."""

    def __init__(self, message, report):
        super().__init__(message)
        self.report = report


class FormatError(ZKError, ValueError):
    """A stored field, boundary file or config could not be parsed."""
