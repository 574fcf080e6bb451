"""Exception types shared across the package."""


class NMSLabError(Exception):
    """Base class for all errors raised by nmslab."""


class ParameterError(NMSLabError, ValueError):
    """One or more physical parameters violate their invariants.

    ``violations`` holds one ``(field, message)`` pair per failed check.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(msg for _, msg in self.violations))


class ConfigError(NMSLabError, ValueError):
    """A configuration file could not be read or interpreted."""


class ThresholdError(NMSLabError, ValueError):
    """The operating point is at or above the OPA oscillation threshold."""


class InstabilityError(NMSLabError):
    """A quantity that requires a stable operating point was requested for an unstable one."""


class NumericalError(NMSLabError, ArithmeticError):
    """A numerical routine failed (non-convergence, singular system, residual check)."""


class NoOnsetError(NMSLabError, ValueError):
    """The splitting state does not change over the requested sweep range."""
