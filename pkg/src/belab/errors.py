"""Exception types shared across the package."""


class BelabError(Exception):
    """Base class for all errors raised by belab."""


class DegenerateLaw(BelabError):
    pass


class PreconditionViolated(BelabError, ValueError):
    pass


class BadDimension(BelabError, ValueError):
    pass


class QuadratureFailure(BelabError):
    pass


class BudgetExceeded(BelabError):
    """Exact enumeration would need more atoms than allowed."""

    def __init__(self, required, budget):
        self.required = required
        self.budget = budget
        super().__init__(f"enumeration needs {required} atoms, budget is {budget}")


class DegenerateFit(BelabError):
    pass


class ConfigError(BelabError, ValueError):
    pass
