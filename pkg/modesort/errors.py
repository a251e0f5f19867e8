"""Exception and warning types shared by every modesort sub-package."""


class ModesortError(Exception):
    """Base class for all modesort failures."""


class GridMismatchError(ModesortError, ValueError):
    pass


class DomainError(ModesortError, ValueError):
    pass


class RankError(ModesortError, ValueError):
    pass


class NormalizationError(ModesortError, ValueError):
    pass


class BasisError(ModesortError, ValueError):
    pass


class NumericError(ModesortError, RuntimeError):
    pass


class ConservationError(ModesortError, RuntimeError):
    """A computed efficiency exceeded one (photon number not conserved)."""


class ProjectionLossError(ModesortError, ValueError):
    pass


class CoverageError(ModesortError, ValueError):
    pass


class RangeError(ModesortError, ValueError):
    pass


class SaturationError(ModesortError, RuntimeError):
    """Expected detector count rate above the configured maximum."""


class UndefinedSeparabilityError(ModesortError, ValueError):
    pass


class ConvergenceError(ModesortError, RuntimeError):
    pass


class SPSAAbortError(ModesortError, RuntimeError):
    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = list(trace or [])


class ConfigError(ModesortError, ValueError):
    pass


class ArtifactMissingError(ModesortError, FileNotFoundError):
    pass


class AccuracyWarning(UserWarning):
    pass


class DataQualityWarning(UserWarning):
    pass


class ConvergenceWarning(UserWarning):
    pass
