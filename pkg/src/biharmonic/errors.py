"""Exception types shared across the package."""


class BiharmonicError(Exception):
    """Base class for all package errors."""


class DomainError(BiharmonicError, ValueError):
    """Arguments outside the validity range of a formula (e.g. n <= 4)."""


class RegimeError(BiharmonicError):
    """The requested (n, p) regime has no solution of the requested kind."""


class StabilityViolated(BiharmonicError):
    """The stability condition fails, so the requested real roots do not exist."""


class NoConvergence(BiharmonicError):
    """An iterative search (bracketing, bisection) did not converge."""


class IntegrationError(BiharmonicError):
    """The ODE integrator failed (step-size underflow or similar)."""
