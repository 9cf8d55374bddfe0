"""Exception types shared across the package."""


class BanditError(Exception):
    """Base class for all twoarm errors."""


class ImpossibleObservation(BanditError):
    """An outcome outside the value alphabet, or one with zero mass under
    both hypotheses given the current belief."""


class PolicyHorizonMismatch(BanditError):
    """A policy that cannot be played over the requested number of trials."""


class HorizonTooSmall(PolicyHorizonMismatch):
    """A policy variant whose forced prefix does not fit the horizon."""


class EnumerationTooLarge(BanditError):
    """Strategy enumeration would exceed the configured cap."""

    def __init__(self, count: int, cap: int):
        super().__init__(f"enumeration of {count} trees exceeds cap {cap}")
        self.count = count
        self.cap = cap


class EmptyGrid(BanditError):
    """A scan was requested over an empty grid."""


class InvalidParameters(BanditError):
    """Parameters outside the domain a routine is defined on."""


class ConfigError(BanditError):
    """Invalid experiment configuration; `path` locates the offending entry."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path
