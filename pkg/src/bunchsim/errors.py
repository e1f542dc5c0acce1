"""Exception hierarchy.

Everything derives from :class:`BunchsimError` so the CLI can map library
failures to exit status 1 with a single ``except``.
"""


class BunchsimError(Exception):
    pass


class DimensionError(BunchsimError, ValueError):
    pass


class DomainError(BunchsimError, ValueError):
    pass


class ValidationError(BunchsimError, ValueError):
    pass


class NotUnitaryError(ValidationError):
    def __init__(self, residual: float, tol: float):
        self.residual = residual
        self.tol = tol
        super().__init__(
            f"matrix is not unitary: max|U^dag U - I| = {residual:.3e} exceeds tolerance {tol:.1e}"
        )


class ModelViolationError(BunchsimError, ValueError):
    pass


class SizeGuardError(BunchsimError, ValueError):
    pass


class ResourceError(BunchsimError, RuntimeError):
    pass
