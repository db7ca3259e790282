"""Exception types shared across the package.

Each maps onto a CLI exit code (see :mod:`shotvar.cli`).
"""


class ShotvarError(Exception):
    exit_code = 1


class DomainError(ShotvarError, ValueError):
    """An argument lies outside the domain of the operation."""

    exit_code = 2


class ParseError(ShotvarError, ValueError):
    """Malformed input text or file. ``where`` names the offending location."""

    exit_code = 2

    def __init__(self, message: str, where: str | None = None):
        self.where = where
        super().__init__(f"{where}: {message}" if where else message)


class CapacityError(ShotvarError):
    """Too few shots for the requested windows, or too many qubits."""

    exit_code = 3


class InsufficientDataError(ShotvarError):
    exit_code = 3


class DegenerateError(ShotvarError, ArithmeticError):
    """The statistic is undefined because the distribution is deterministic
    (zero spread or zero mean)."""

    exit_code = 4
