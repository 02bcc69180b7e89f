"""Exception hierarchy shared by every module."""


class LevyError(Exception):
    """Base class for all library errors."""


class DomainError(LevyError, ValueError):
    """Argument outside the domain where a formula is defined."""


class SpecError(LevyError, ValueError):
    """Malformed or invalid process specification."""

    def __init__(self, message, field=None):
        super().__init__(message if field is None else f"{field}: {message}")
        self.field = field


class NonIntegrable(LevyError, ArithmeticError):
    """An integrand is not integrable at an endpoint."""


class NonIntegrableMeasure(NonIntegrable):
    """The Levy measure fails the (x^2 ^ 1) integrability condition."""


class QuadratureFailure(LevyError, ArithmeticError):
    """Integration could not reach the requested tolerance within budget."""


class SlowDecay(QuadratureFailure):
    """The integrand decays too slowly for the integral to converge."""


class LambdaOutOfRange(QuadratureFailure):
    """A numeric exponent was requested beyond the resolvable frequency range."""


class AssumptionViolation(LevyError):
    """A probe shows that an integrability assumption fails."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class AssumptionAViolation(AssumptionViolation):
    pass


class AssumptionTViolation(AssumptionViolation):
    pass


class AssumptionZViolation(AssumptionViolation):
    pass


class DegenerateResolvent(LevyError, ArithmeticError):
    """r_q(0) is indistinguishable from zero."""


class UnstableLimit(LevyError):
    """A ratio of slowly varying functions shows no stable limit."""


class CaseMismatch(LevyError):
    """Numeric evidence contradicts the declared hypothesis case."""


class NotApplicable(LevyError):
    """The requested check has no content for these inputs."""
