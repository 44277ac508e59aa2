"""Exception hierarchy shared by all vinerow modules."""


class VinerowError(Exception):
    """Base class for every error raised by this package."""


class ContractViolation(VinerowError, ValueError):
    """An input broke a documented precondition (e.g. a non-unit direction)."""


class InvalidParameter(VinerowError, ValueError):
    pass


class DegeneratePair(VinerowError, ValueError):
    """Two points that should define a line coincide."""


class NoRowFound(VinerowError):
    """No candidate line contains the trunk closest to the robot."""


class RowLost(VinerowError):
    """Too few clusters remain near the tracked row line to refit it."""


class NoValidDepth(VinerowError):
    """Every pixel of the depth image is invalid (NaN)."""


class BehindCamera(VinerowError, ValueError):
    pass


class ConfigError(VinerowError, ValueError):
    """A configuration file failed to parse or validate.

    ``key`` names the offending entry (dotted path) when one is known.
    """

    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key


class TraceError(VinerowError, ValueError):
    """A trace file could not be parsed; ``line`` is 1-based."""

    def __init__(self, message, line=None):
        super().__init__(message)
        self.line = line
