"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument left the domain an operation is defined on (e.g. x outside
    [0, 1], or a logarithm of a non-positive quantity)."""


class ParameterError(ValueError):
    """A map or condition parameter is outside the range the operation
    supports (singular, degenerate, or out of the admissible interval)."""


class EscapeError(RuntimeError):
    """An iterate left [0, 1] by more than the escape tolerance; the map
    parameters do not keep the unit interval invariant."""


class SingularDerivativeError(ArithmeticError):
    """A log-derivative was requested at a point where the selected map has
    (numerically) zero slope."""


class NonUniqueStationaryError(RuntimeError):
    """The transition matrix is reducible and does not determine a unique
    stationary distribution."""
