"""Exception hierarchy shared across the package."""


class OneStepError(Exception):
    """Base class for all package errors."""


class ShapeError(OneStepError, ValueError):
    """Distributions or vectors do not share a grid / atom set / length."""


class DomainError(OneStepError, ValueError):
    """An argument lies outside the set where the operation is defined."""


class DegeneratePathError(DomainError):
    """The path endpoints coincide, so distance-based reindexing is undefined."""


class BandwidthError(DomainError):
    """A bandwidth rule produced a non-positive bandwidth."""


class SupportError(DomainError):
    """Too much mass sits where the reference density is floored."""


class UnsupportedError(OneStepError):
    """Requested combination of inputs is not supported."""


class ConfigError(OneStepError):
    """A run configuration could not be parsed or resolved."""
