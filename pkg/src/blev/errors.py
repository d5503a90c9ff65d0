"""Exception hierarchy shared by every module of the lab."""


class BlevError(Exception):
    """Base class for all lab errors."""


class ModelError(BlevError, ValueError):
    """A model description is invalid (bad field, violated invariant)."""


class DomainError(BlevError, ValueError):
    """A parameter lies outside the finiteness domain of the cumulant."""


class ConditionError(BlevError):
    """A theorem precondition does not hold; ``clause`` names the failed clause."""

    def __init__(self, message, clause=None):
        super().__init__(message)
        self.clause = clause


class UnsupportedCondition(BlevError, KeyError):
    """Unknown condition tag passed to ``check_condition``."""

    def __str__(self):
        return str(self.args[0]) if self.args else "unsupported condition"


class Explosion(BlevError):
    """Live particle count exceeded the configured cap.

    ``realization`` carries the truncated realization, ``replica`` the replica
    index when raised from the replica runner.
    """

    def __init__(self, message, realization=None, replica=None):
        super().__init__(message)
        self.realization = realization
        self.replica = replica


class DegenerateInput(BlevError, ValueError):
    """Estimator input carries no information (e.g. tied order statistics)."""


class InsufficientSamples(BlevError):
    """Too few usable replicas remain after filtering."""


class ConfigError(BlevError, ValueError):
    """An experiment or run configuration is invalid."""
