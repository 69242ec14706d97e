"""Exception hierarchy for ptdirac."""


class PTDiracError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(PTDiracError, ValueError):
    """Input lies outside the domain of the operation."""


class ThresholdError(DomainError):
    """Energy too close to a continuum threshold |E| = m."""


class PoleProximityError(PTDiracError, ArithmeticError):
    """A closed-form expression is evaluated too close to one of its poles."""


class QuadratureError(PTDiracError, RuntimeError):
    """Adaptive quadrature did not reach the requested tolerance."""


class SingularDenominatorError(PTDiracError, ArithmeticError):
    """det M+ vanishes on the real scattering axis."""


class ComplexDeterminantError(PTDiracError, ArithmeticError):
    """det M+ is not real on the bound-state branch."""


class DegenerateError(PTDiracError, ArithmeticError):
    """A quadratic in the coupling strength degenerates."""
