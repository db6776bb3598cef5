"""Exception hierarchy shared by every module."""


class BohrLabError(Exception):
    """Base class for all errors raised by bohr_lab."""


class PreconditionError(BohrLabError, ValueError):
    """An argument lies outside the range an operation is defined for."""


class WeightConditionError(PreconditionError):
    """The weight polynomial violates the admissibility condition.

    Carries the evaluated left-hand side so callers can report it.
    """

    def __init__(self, message, lhs, p):
        super().__init__(message)
        self.lhs = lhs
        self.p = p


class InvalidMapError(BohrLabError):
    """A map descriptor left the closed unit polydisc (or its theorem class)."""


class NoRootError(BohrLabError):
    """The residual of a radius equation never changed sign on (0, 1)."""

    def __init__(self, message, residual_min, residual_max):
        super().__init__(message)
        self.residual_min = residual_min
        self.residual_max = residual_max


class SharpnessProbeError(BohrLabError):
    """No b in the probe grid produced a left-hand side above 1."""

    def __init__(self, message, max_lhs, max_b):
        super().__init__(message)
        self.max_lhs = max_lhs
        self.max_b = max_b
