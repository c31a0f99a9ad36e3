"""Exception types shared across the package."""


class HeatBAError(Exception):
    """Base class for package errors."""


class DomainError(HeatBAError, ValueError):
    """A function was evaluated where its extension policy gives no value."""


class NumericalGuardError(HeatBAError, ArithmeticError):
    """A numerical guard tripped; ``guard`` names it for reports and exit codes."""

    def __init__(self, guard, message):
        super().__init__(f"{guard}: {message}")
        self.guard = guard
