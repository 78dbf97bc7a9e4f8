"""Exception hierarchy shared by all modules."""


class RadiationReactionError(Exception):
    """Base class for every error raised by rrshift."""


class ConfigError(RadiationReactionError, ValueError):
    """Malformed or inconsistent input parameters."""


class DomainError(RadiationReactionError, ValueError):
    """A parameter lies outside the physical domain of the model."""


class TurningPointError(DomainError):
    """The particle (or a WKB mode) would reach zero velocity."""


class KinematicsError(DomainError):
    """The final-state momentum of an emission process is not real."""


class ToleranceError(RadiationReactionError, ArithmeticError):
    """A numerical residual exceeded its configured bound."""


class CutoffCoverageError(ToleranceError):
    """The cutoff plateau does not cover the acceleration support."""


class TailError(ToleranceError):
    """The truncated spectral tail is larger than allowed."""


class DerivativeStepError(ToleranceError):
    """Step-doubling estimate of a finite-difference derivative is too large."""
