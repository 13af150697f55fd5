class RotorError(Exception):
    """Base class for every error raised by the rotor coherent-state toolkit."""


class SpaceMismatchError(RotorError, ValueError):
    pass


class InvalidLabelError(RotorError, ValueError):
    pass


class TowerMismatchError(RotorError, ValueError):
    pass


class DomainError(RotorError, ValueError):
    pass


class ConvergenceError(RotorError, ArithmeticError):
    pass


class MobiusPoleError(RotorError, ZeroDivisionError):
    pass


class NegativeExponentError(RotorError, ValueError):
    pass


class EvolutionPoleError(RotorError, OverflowError):
    pass


class MissingMeasureError(RotorError, LookupError):
    pass


class ConfigFormatError(RotorError, ValueError):
    pass
