"""Exception types raised across the package."""


class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation."""


class DegenerateChannelError(DomainError):
    """A virtual channel with vanishing energy gap was supplied."""


class OutOfRegimeError(DomainError):
    """An asymptotic formula was requested outside its validity window."""


class QuadratureError(RuntimeError):
    """Numerical integration or series acceleration failed to converge."""


class TrackingError(RuntimeError):
    """Adiabatic branch assignment became ambiguous along a distance grid."""
