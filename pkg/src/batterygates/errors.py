"""Exception types raised by the library."""


class BatteryGatesError(Exception):
    """Base class for all library errors."""


class NonUnitary(BatteryGatesError, ValueError):
    pass


class TailTruncated(BatteryGatesError, ValueError):
    """The truncation leaves more than the allowed amplitude mass outside."""


class NotNormalizable(BatteryGatesError, ValueError):
    pass


class QuadratureNoConvergence(BatteryGatesError, ArithmeticError):
    pass


class BadWeights(BatteryGatesError, ValueError):
    pass


class TruncationMismatch(BatteryGatesError, ValueError):
    pass


class GroundOccupied(BatteryGatesError, ValueError):
    pass


class SupportViolation(BatteryGatesError, ValueError):
    pass


class OutOfRange(BatteryGatesError, ValueError):
    pass


class GateNotBlockForm(BatteryGatesError, ValueError):
    pass


class UnknownResource(BatteryGatesError, ValueError):
    pass
