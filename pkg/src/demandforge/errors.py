"""Exception hierarchy. Everything raised on purpose derives from DemandforgeError."""


class DemandforgeError(Exception):
    """Base class for all errors raised by this package."""


# --- dataset ---------------------------------------------------------------

class MissingColumn(DemandforgeError):
    pass


class ParseError(DemandforgeError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class FrequencyViolation(DemandforgeError):
    pass


class GapError(DemandforgeError):
    pass


class NegativeTarget(DemandforgeError):
    pass


class SeriesTooShort(DemandforgeError):
    def __init__(self, message: str, keys=()):
        super().__init__(message)
        self.keys = tuple(keys)


class DuplicateKey(DemandforgeError):
    pass


class SchemaCollision(DemandforgeError):
    pass


class PanelError(DemandforgeError):
    pass


# --- features ---------------------------------------------------------------

class EmptyMatrix(DemandforgeError):
    pass


# --- models -----------------------------------------------------------------

class InsufficientData(DemandforgeError):
    pass


class SingularSystem(DemandforgeError):
    pass


class UnknownSeries(DemandforgeError):
    pass


class VersionMismatch(DemandforgeError):
    pass


class CorruptPayload(DemandforgeError):
    pass


# --- validation / tuning ------------------------------------------------------

class TooFewSeries(DemandforgeError):
    pass


class OutOfRange(DemandforgeError):
    pass


# --- metrics ------------------------------------------------------------------

class EmptyInput(DemandforgeError):
    pass


class ZeroDenominator(DemandforgeError):
    pass


class ZeroDemand(DemandforgeError):
    pass


# --- cli ------------------------------------------------------------------------

class ConfigError(DemandforgeError):
    pass
