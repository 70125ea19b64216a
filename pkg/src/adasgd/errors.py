"""Exception types raised across the package."""


class ContractViolation(ValueError):
    """Argument shapes or dimensions do not match the problem."""


class InvalidInput(ValueError):
    """A scalar parameter is outside its admissible range."""


class ConfigurationError(ValueError):
    """An oracle or experiment was configured inconsistently."""


class UnsupportedQuery(ValueError):
    """The requested quantity does not exist for this object (e.g. an a.s. bound on unbounded noise)."""


class OracleMisconfiguration(RuntimeError):
    """Rejection sampling hit its retry cap; the inner noise is not sub-Gaussian as declared."""


class NumericFailure(FloatingPointError):
    def __init__(self, step: int, message: str = "non-finite stochastic gradient"):
        super().__init__(f"{message} at step {step}")
        self.step = step
