"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Inputs are inconsistent with the requested computation mode."""


class QuadratureError(RuntimeError):
    """The z-integration failed its doubling convergence test.

    Carries the observed residual (max entrywise change of the normalized
    state when the number of quadrature points is doubled).
    """

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = float(residual)
