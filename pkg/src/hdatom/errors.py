"""Exception hierarchy.

Configuration problems derive from :class:`ConfigError` (a ``ValueError``),
numerical failures from :class:`NumericalError`. The CLI maps the two families
onto distinct exit codes.
"""


class HDAtomError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(HDAtomError, ValueError):
    pass


class DimensionTooLow(ConfigError):
    pass


class NonPositiveCharge(ConfigError):
    pass


class NegativeL(ConfigError):
    pass


class NonPositiveRadius(ConfigError):
    pass


class LengthMismatch(ConfigError):
    pass


class ScalingUndefined(ConfigError):
    pass


class PositiveEnergy(ConfigError):
    pass


class UnsupportedDimension(ConfigError):
    pass


class NonPositiveRho(ConfigError):
    pass


class DomainError(ConfigError):
    pass


class GridTooCoarse(ConfigError):
    pass


class NumericalError(HDAtomError, ArithmeticError):
    pass


class ConvergenceError(NumericalError):
    pass


class CutoffTooSmall(NumericalError):
    """The potential overflows at the inner cutoff."""


class QuadratureDivergent(NumericalError):
    pass


class InvariantViolation(HDAtomError, RuntimeError):
    """An internal consistency check failed; indicates a bug, not bad input."""
