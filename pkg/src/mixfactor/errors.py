"""Exception hierarchy; the CLI maps each class to an exit code."""


class MixfactorError(Exception):
    pass


class SchemaError(MixfactorError, ValueError):
    """Input does not satisfy a structural contract (shapes, columns, groups)."""


class UnknownLevelError(SchemaError):
    def __init__(self, variable: str, level: str):
        super().__init__(f"unknown level {level} for variable {variable}")
        self.variable = variable
        self.level = level


class ZeroVarianceError(SchemaError):
    def __init__(self, variable: str):
        super().__init__(f"zero variance in numeric variable {variable}")
        self.variable = variable


class DimensionError(SchemaError):
    """Requested number of components (ndim, k) is out of range."""


class NumericalError(MixfactorError, ArithmeticError):
    """A numerical routine failed (non-convergence, degenerate decomposition)."""
