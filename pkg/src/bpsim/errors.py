"""Exception types shared across the package."""


class BpsimError(Exception):
    """Base class for all bpsim errors."""


class ConfigError(BpsimError):
    """Invalid configuration: unknown family, bad field, unparseable file."""


class BracketError(BpsimError):
    """Root finding failed: no sign change on the supplied interval."""


class ToleranceError(BpsimError):
    """A numeric routine could not reach the requested tolerance."""


class SamplerError(BpsimError):
    """A sampler could not produce a valid draw (overflow guard, failed inversion)."""
