"""Exception hierarchy shared by all modules."""


class SpeventsError(Exception):
    """Base class for every error raised by this package."""


class ShapeError(SpeventsError, ValueError):
    """Operands have incompatible dimensions."""


class CapacityError(SpeventsError):
    """A state would exceed the supported number of qubits."""


class ArgumentError(SpeventsError, ValueError):
    """An argument is outside the operation's domain."""


class PreconditionError(SpeventsError):
    """An operation was called on an input that violates its precondition."""


class ModelError(SpeventsError):
    """A model (Gram matrix, ontic model) is internally inconsistent."""


class ValidationError(SpeventsError):
    """A scenario violates one or more structural rules."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations) or "invalid scenario")


class GeometryError(ValidationError):
    """A scenario places an interaction off a participant's worldline."""


class ParseError(SpeventsError):
    """Scenario text does not follow the grammar.

    ``line`` and ``column`` are 1-based and point at the first offending
    character; ``expected`` describes the token class the parser wanted.
    """

    def __init__(self, message: str, line: int, column: int, expected: str = ""):
        self.message = message
        self.line = line
        self.column = column
        self.expected = expected
        where = f"line {line}, column {column}"
        tail = f" (expected {expected})" if expected else ""
        super().__init__(f"{where}: {message}{tail}")

    def to_dict(self) -> dict:
        return {
            "error": "parse",
            "line": self.line,
            "column": self.column,
            "message": self.message,
            "expected": self.expected,
        }


class ContradictionError(SpeventsError):
    """A declared measurement outcome has zero Born probability."""


class UnknownNameError(SpeventsError, LookupError):
    """A named item (built-in scenario, gate) does not exist."""
