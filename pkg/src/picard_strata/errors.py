"""Exception types shared by every module."""


class ValidationError(ValueError):
    """Input violates a documented precondition (bad graph, wrong genus, ...)."""


class InvariantViolation(RuntimeError):
    """An internal check failed, e.g. a combinatorial claim was falsified."""
