"""Exception types raised by deltawall."""


class DeltaWallError(Exception):
    """Base class for all library errors."""


class DomainError(DeltaWallError, ValueError):
    """An argument lies outside the domain of an operation."""


class BranchError(DeltaWallError, ValueError):
    """A finite-strength routine received a symbolic infinite strength."""


class UnsupportedEndpointError(DeltaWallError, ValueError):
    """The requested parameter point is only meaningful as a limit along a path."""


class ExceptionalConfigurationError(DeltaWallError, ValueError):
    """A wall position sits on a node of one of the tracked levels.

    ``level`` and ``position`` name the offending pair.
    """

    def __init__(self, level, position, message=None):
        self.level = level
        self.position = position
        if message is None:
            message = (
                f"level {level} has a node at the wall position X={position!r}; "
                "choose a position away from the nodes of the tracked levels"
            )
        super().__init__(message)


class NormDriftError(DeltaWallError, RuntimeError):
    """Time stepping lost normalization beyond tolerance at ``step``."""

    def __init__(self, step, drift):
        self.step = step
        self.drift = drift
        super().__init__(f"norm drift {drift:.3e} exceeds tolerance at step {step}; reduce dt")
