"""Exception types shared across the package."""


class InvalidParameterError(ValueError):
    """A physical or numerical parameter is outside its allowed range."""


class NumericDomainError(ArithmeticError):
    """A closed-form result leaves its physical domain (e.g. negative weights)."""


class UndefinedWeakValueError(ZeroDivisionError):
    """Pre- and post-selected states are (numerically) orthogonal."""


class IntegrationError(RuntimeError):
    """The adaptive ODE integrator failed to reach the requested tolerance."""
