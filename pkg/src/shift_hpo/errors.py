"""Exception types raised across the package."""


class ShiftHpoError(Exception):
    """Base class for all package errors."""


class ConfigError(ShiftHpoError, ValueError):
    pass


class SplitError(ShiftHpoError, ValueError):
    pass


class IngestionError(ShiftHpoError, ValueError):
    pass


class InputError(ShiftHpoError, ValueError):
    pass


class FittingError(ShiftHpoError, RuntimeError):
    pass


class WeightingError(ShiftHpoError, ValueError):
    pass


class AssumptionError(ShiftHpoError, ValueError):
    """Source distribution lacks support where the target has mass."""


class TrainingError(ShiftHpoError, RuntimeError):
    pass


class NumericError(ShiftHpoError, RuntimeError):
    pass
