"""Exception hierarchy.

Every exception carries a short ``category`` string so the CLI can report a
machine-readable error kind.
"""


class OmnisecError(Exception):
    category = "error"


class ZeroVector(OmnisecError, ValueError):
    category = "zero_vector"


class CoincidentPoints(OmnisecError, ValueError):
    category = "coincident_points"


class DomainError(OmnisecError, ValueError):
    category = "domain"


class BelowMinDistance(OmnisecError, ValueError):
    category = "below_min_distance"


class OutOfBox(OmnisecError, ValueError):
    category = "out_of_box"


class PowerOutOfRange(OmnisecError, ValueError):
    category = "power_out_of_range"


class BudgetExceeded(OmnisecError, RuntimeError):
    category = "budget_exceeded"


class ZeroThrust(OmnisecError, ValueError):
    category = "zero_thrust"


class ParseError(OmnisecError, ValueError):
    """Malformed config document; ``path`` names the offending key."""

    category = "parse"

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}")


class ValidationError(OmnisecError, ValueError):
    """Config value violates a named constraint."""

    category = "validation"

    def __init__(self, constraint, message=""):
        self.constraint = constraint
        super().__init__(f"{constraint}: {message}" if message else constraint)
