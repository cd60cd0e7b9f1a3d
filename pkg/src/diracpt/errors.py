"""Exception hierarchy shared by every module.

All library errors derive from :class:`DiracPTError` so callers (and the CLI)
can separate numerical failures from programming mistakes.
"""


class DiracPTError(Exception):
    """Base class for all package errors."""


class ConfigError(DiracPTError, ValueError):
    """Invalid user configuration (bad parameters, limits, CLI input)."""


class NumericalError(DiracPTError, ArithmeticError):
    """A computation could not be completed to the requested accuracy."""


# core
class NonPositiveMass(ConfigError):
    pass


class SingularMatching(NumericalError):
    pass


class SingularBasis(NumericalError):
    pass


class DegenerateChannel(NumericalError):
    pass


# potentials
class UnknownModel(ConfigError):
    pass


class LimitMismatch(ConfigError):
    pass


class NotPTSymmetric(ConfigError):
    pass


class ZeroShift(ConfigError):
    pass


class PoleOnAxis(ConfigError):
    pass


# integrator
class StepLimitExceeded(NumericalError):
    pass


class NotScattering(ConfigError):
    pass


class UnsupportedModel(ConfigError):
    pass


class WrongPotentialClass(ConfigError):
    pass


# analytic
class NotNormalizable(NumericalError):
    pass


class NotApplicable(ConfigError):
    pass


class OutOfStatedDomain(ConfigError):
    pass


class ShiftDomain(ConfigError):
    pass


# susy
class SingularMap(NumericalError):
    pass


class GridTooCoarse(NumericalError):
    pass


class ThresholdEnergy(ConfigError):
    pass


# boundstates
class NoBracket(NumericalError):
    pass


class NonConvergence(NumericalError):
    pass


class NormalizationFailure(NumericalError):
    pass


# exprdsl
class ExprError(ConfigError):
    """Base for expression-language errors; carries a byte offset."""

    def __init__(self, message, offset=None, expected=None):
        self.offset = offset
        self.expected = frozenset(expected) if expected else frozenset()
        detail = message
        if offset is not None:
            detail = f"{message} (at offset {offset})"
        if self.expected:
            detail += f"; expected one of: {', '.join(sorted(self.expected))}"
        super().__init__(detail)


class ExprSyntaxError(ExprError):
    pass


class UnknownFunction(ExprError):
    pass


class UnknownIdentifier(ExprError):
    pass


class UnboundParameter(ExprError):
    pass


class EvaluationPole(ExprError, NumericalError):
    pass
