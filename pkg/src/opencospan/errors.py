"""Exception hierarchy shared by every module."""


class OpenCospanError(Exception):
    """Base class for all library errors."""


class DomainMismatch(OpenCospanError):
    pass


class CodomainMismatch(OpenCospanError):
    pass


class FootMismatch(OpenCospanError):
    """Two open systems cannot be composed because their feet differ."""

    def __init__(self, right, left):
        self.right = right
        self.left = left
        super().__init__(
            f"foot mismatch: right foot {sorted(right)} != left foot {sorted(left)}"
        )


class TypeMismatch(OpenCospanError):
    pass


class LawViolation(OpenCospanError):
    def __init__(self, law: str):
        self.law = law
        super().__init__(f"law violated: {law}")


class UnknownTransition(OpenCospanError):
    pass


class NotEnabled(OpenCospanError):
    pass


class InvalidMorphism(OpenCospanError):
    pass


class ScopeMismatch(OpenCospanError):
    pass


class ShapeMismatch(OpenCospanError):
    pass


class UnboundVariable(OpenCospanError):
    pass


class DivisionByZero(OpenCospanError, ZeroDivisionError):
    pass


class NonFiniteState(OpenCospanError):
    def __init__(self, time: float):
        self.time = time
        super().__init__(f"state became non-finite at t={time!r}")


class Mismatch(OpenCospanError):
    """Two steady states cannot be glued."""

    def __init__(self, reason: str):
        self.reason = reason
        super().__init__(reason)


class SchemaError(OpenCospanError):
    """A file does not follow the on-disk schema."""
