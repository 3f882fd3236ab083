"""
Exception hierarchy shared by the services, the CLI and the HTTP layer
"""
from typing import Optional


class SimulationError(Exception):
    """Base class for every error raised by the simulator"""

    exit_code: int = 1


class InvalidParameterError(SimulationError, ValueError):
    """A physical or numerical parameter is outside its domain"""


class InvalidInputError(SimulationError, ValueError):
    """A matrix or record handed to a service violates its contract"""


class InvariantViolationError(SimulationError):
    """An internal consistency check on a computed record failed"""

    exit_code = 4


class ConfigError(SimulationError):
    """Sweep configuration could not be built or validated"""

    exit_code = 1

    def __init__(self, message: str, fields: Optional[list] = None):
        self.fields = fields or []
        super().__init__(message)


class OracleMismatchError(SimulationError):
    """Closed-form and brute-force paths disagree beyond tolerance"""

    exit_code = 2

    def __init__(self, t: float, quantity: str, closed_form: complex, oracle: complex):
        self.t = t
        self.quantity = quantity
        self.closed_form = closed_form
        self.oracle = oracle
        self.delta = abs(closed_form - oracle)
        super().__init__(
            f"Oracle mismatch at t={t!r} for {quantity}: "
            f"closed-form={closed_form!r}, oracle={oracle!r}, delta={self.delta!r}"
        )


class OutputError(SimulationError):
    """Writing results to disk failed"""

    exit_code = 3

    def __init__(self, path: str, reason: str):
        self.path = path
        super().__init__(f"Cannot write {path}: {reason}")
