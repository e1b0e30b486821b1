"""Exception hierarchy shared by every module of the package."""


class OipSwitchError(Exception):
    """Base class for all errors raised by oipswitch."""


class NonPhysicalProfile(OipSwitchError):
    """Carrier density came out negative for the given material parameters."""


class GridMismatch(OipSwitchError):
    """A depth profile does not span the requested thickness."""


class SingularConversion(OipSwitchError):
    """ABCD to S conversion hit a vanishing denominator."""


class NoConvergence(OipSwitchError):
    """An iterative solver ran out of iterations."""


class InsufficientData(OipSwitchError):
    """Too few frequency points for the requested fit."""


class NonPassiveData(OipSwitchError):
    """Measured |S21| exceeds unity."""


class NotConverged(OipSwitchError):
    """Raised by callers that treat an unconverged fit as fatal."""


class OutOfRange(OipSwitchError):
    """A calibration target cannot be reached inside the allowed interval."""

    def __init__(self, message: str, required: float | None = None):
        super().__init__(message)
        self.required = required


class ParseError(OipSwitchError):
    def __init__(self, reason: str, line: int | None = None):
        self.reason = reason
        self.line = line
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{reason}")


class NonMonotoneFrequency(ParseError):
    pass


class ConfigError(OipSwitchError):
    def __init__(self, reason: str, key_path: str = ""):
        self.reason = reason
        self.key_path = key_path
        prefix = f"{key_path}: " if key_path else ""
        super().__init__(f"{prefix}{reason}")
