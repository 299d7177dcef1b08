class GTheoryError(Exception):
    """Base class for analysis errors raised by this package."""


class DataError(GTheoryError, ValueError):
    pass


class DuplicateRecordError(DataError):
    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key


class ConfigError(GTheoryError, ValueError):
    pass


class DesignError(GTheoryError, ValueError):
    """The data do not support the requested design (too few levels, missing facet)."""


class DegenerateMeasurementError(GTheoryError, ArithmeticError):
    """A reliability ratio has a zero denominator."""
