"""Exception hierarchy shared across the package."""


class LPSSError(Exception):
    """Base class for all package errors."""


class DomainError(LPSSError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class NotationError(LPSSError, ValueError):
    """Malformed subspace notation string."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class DimensionMismatchError(LPSSError, ValueError):
    def __init__(self, declared: int, expected: int):
        super().__init__(
            f"notation declares {declared} dimensions but the problem has {expected}"
        )
        self.declared = declared
        self.expected = expected


class DesignError(LPSSError, ValueError):
    """A design specification violates one of its invariants."""


class ContractError(LPSSError, RuntimeError):
    """A numerical contract (e.g. weight normalization) was violated."""


class ConstructionError(ContractError):
    """A Latinized stratified design could not be produced."""

    def __init__(self, message: str, attempts: int):
        super().__init__(f"{message} after {attempts} attempt(s)")
        self.attempts = attempts
