class ContractViolation(ValueError):
    """Raised when an argument breaks an operation's precondition."""


class DomainError(ValueError):
    """Raised when a point lies outside the region where an operation is defined."""
