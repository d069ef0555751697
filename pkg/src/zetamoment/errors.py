"""Exception hierarchy shared by every module of the package."""


class ZetaMomentError(Exception):
    """Base class for all errors raised by zetamoment."""


class DomainError(ZetaMomentError, ValueError):
    """An argument lies outside the supported domain of an operation."""


class PoleAtOne(DomainError):
    """zeta was asked for a value within the pole guard radius of s = 1."""


class NonFiniteResult(ZetaMomentError, ArithmeticError):
    """A computation overflowed or produced NaN."""


class NonConvergence(ZetaMomentError):
    """Adaptive quadrature exhausted its subdivision budget."""

    def __init__(self, message, panel_index=None):
        super().__init__(message)
        self.panel_index = panel_index


class UnsupportedSigma(DomainError):
    """The closed form is not specified at this sigma (boundary values 0 and 1)."""


class RegimeViolation(DomainError):
    """(sigma, r) fall outside the validity range of an identity."""


class InsufficientCrossings(ZetaMomentError):
    """Too few asymptote crossings to estimate a period."""


class DegenerateSegment(ZetaMomentError, ArithmeticError):
    """A signal has (numerically) zero variance over the requested segment."""


class IncompatibleCache(ZetaMomentError):
    """A cache file on disk does not match the requested grid."""


class ConfigError(ZetaMomentError, ValueError):
    """An experiment configuration file is malformed."""
