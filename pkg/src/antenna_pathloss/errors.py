"""Exception types raised across the package."""


class PathLossError(Exception):
    """Base class for all package errors."""


class InputDataError(PathLossError):
    """Raised for malformed or unusable input data (CLI exit code 3)."""


class ParseError(InputDataError):
    pass


class EmptyProfile(InputDataError):
    pass


class MissingScale(InputDataError):
    pass


class UnknownAntenna(InputDataError):
    pass


class InvalidDistance(PathLossError, ValueError):
    pass


class OutOfRange(PathLossError, ValueError):
    pass


class NoDelayedTaps(PathLossError):
    pass


class DegenerateEllipse(PathLossError):
    pass


class MixedAntennaTypes(PathLossError):
    pass
