"""Exception hierarchy shared across the simulator."""


class IabSimError(Exception):
    """Base class for all simulator errors."""


class InvalidParameterError(IabSimError, ValueError):
    """A physical or statistical parameter is out of its valid range."""


class DegenerateLinkError(IabSimError, ValueError):
    """Transmitter and receiver coincide; the link has no direction."""


class EmptyNetworkError(IabSimError, ValueError):
    """An association rule was asked to run with no candidate stations."""


class UndefinedCoverageError(IabSimError, ValueError):
    """Coverage is undefined because the realization contains no UEs."""


class EstimationError(IabSimError, RuntimeError):
    """No usable realizations survived; the estimator has no data."""


class ConfigError(IabSimError, ValueError):
    """A scenario file or run manifest is malformed or inconsistent."""


class FootprintError(IabSimError, ValueError):
    """A building-footprint file could not be parsed into valid prisms."""
