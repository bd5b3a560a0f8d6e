"""Exception types raised by the planning library."""


class PlannerError(Exception):
    """Base class for all library errors."""


class InvalidParameterError(PlannerError, ValueError):
    """An argument violates a precondition (bad alpha, selector mismatch, ...)."""


class ConfigurationError(PlannerError):
    """Inconsistent or incomplete configuration (integration settings, scenario files, ...)."""


class CapacityRangeError(PlannerError):
    """A capacity target cannot be reached inside the search bracket."""


class DegenerateReceiverError(PlannerError):
    """One or more receivers cannot decode anything, so an equal-rate plan does not exist."""

    def __init__(self, message: str, receiver_ids: tuple[str, ...] = ()):
        super().__init__(message)
        self.receiver_ids = receiver_ids


class ReconstructionError(PlannerError):
    """Reference operating points could not be recovered from a published threshold grid."""


class GroupSizeError(PlannerError):
    """Too many receivers for exhaustive grouping enumeration."""
