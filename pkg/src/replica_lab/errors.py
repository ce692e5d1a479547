"""Exception types shared across the package."""


class InvalidPriorError(ValueError):
    """Raised when a prior cannot be constructed from the given atoms."""


class DomainError(ValueError):
    """Raised when an argument lies outside the mathematical domain (e.g. r < 0)."""


class InvalidArgumentError(ValueError):
    """Raised for structurally invalid arguments (sizes, counts, ranges)."""


class EnumerationBudgetError(RuntimeError):
    """Raised when exact enumeration would exceed the configuration budget.

    Carries the number of configurations that would be required so callers
    can decide whether to raise the budget or fall back to sampling.
    """

    def __init__(self, required: int, budget: int):
        self.required = required
        self.budget = budget
        super().__init__(
            f"exact enumeration needs {required} configurations, "
            f"budget is {budget}"
        )


class NumericalError(RuntimeError):
    """Raised when an iteration leaves its provably valid range."""
