"""Exception hierarchy shared by the numeric, physics and rendering layers."""


class DomainError(ValueError):
    """An input lies outside the domain where an operation is defined."""


class PunctureError(DomainError):
    """Input hits one of the two removed points (pi/2, -pi/2), (-pi/2, pi/2) of the torus."""


class VelocityError(DomainError):
    """Speed not strictly below the speed of light (|v| >= 1)."""


class InvariantError(ArithmeticError):
    """A computed quantity violated an internal consistency check."""
