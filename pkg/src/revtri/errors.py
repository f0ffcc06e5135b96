"""Exception taxonomy shared by all revtri modules.

The CLI maps these onto process exit codes: schema/input problems exit 3,
hypothesis/capability problems exit 2.
"""


class InputError(ValueError):
    """Malformed or inconsistent input data (shapes, ranks, zero vectors)."""


class SchemaError(InputError):
    """Instance-file violation, carrying a JSON-pointer-style path."""

    def __init__(self, pointer: str, message: str):
        self.pointer = pointer
        super().__init__(f"{pointer}: {message}")


class PositivityError(ValueError):
    """A matrix required to be positive semidefinite is materially not."""

    def __init__(self, message: str, lambda_min: float):
        self.lambda_min = lambda_min
        super().__init__(f"{message} (lambda_min={lambda_min:.6g})")


class HypothesisError(ValueError):
    """A theorem hypothesis fails beyond tolerance where an operation requires it."""

    def __init__(self, message: str, deviation: float = float("nan")):
        self.deviation = deviation
        super().__init__(message)


class CapabilityError(ValueError):
    """The requested operation needs structure the given space/family lacks."""


class ConsistencyError(RuntimeError):
    """An internal invariant failed; indicates an implementation bug."""
