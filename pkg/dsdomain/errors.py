class DomainError(Exception):
    """Base class for every error raised by dsdomain"""
    pass


class MatrixLiteralError(DomainError):
    """Malformed matrix literal or scalar string"""
    pass


class DimensionMismatchError(DomainError):
    pass


class NotPositiveDefiniteError(DomainError):
    pass


class DeterminantError(DomainError):
    """Determinant differs from 1 where the type requires it"""
    pass


class SpectralError(DomainError):
    """Eigenvalue solve failed or left a residual above tolerance"""

    def __init__(self, message: str, residual: float = float("nan")):
        super().__init__(f"{message} (residual={residual:.3e})")
        self.residual = residual


class ZeroMatrixError(DomainError):
    pass


class BoundaryPointError(DomainError):
    """A boundary point was required but an interior or outside class was given"""
    pass


class ProjectionDomainError(DomainError):
    pass


class BusemannPreconditionError(DomainError):
    pass


class StabilizedCenterError(DomainError):
    pass


class GeneratorSetError(DomainError):
    pass


class DegeneratePolytopeError(DomainError):
    pass


class IncidenceError(DomainError):
    pass


class DegenerateWedgeError(DomainError):
    pass


class TransversalityError(DegenerateWedgeError):
    pass


class ExactnessViolationError(DomainError):
    pass


class CycleClosureError(DomainError):
    pass


class FiniteOrderError(DomainError):
    """Restricted word action shows no finite order within the power budget"""

    def __init__(self, message: str, scaling: float = float("nan")):
        super().__init__(f"{message} (measured scaling={scaling:.6g})")
        self.scaling = scaling


class InterlacingPreconditionError(DomainError):
    pass


class OracleBudgetError(DomainError):
    pass


class GridConfigError(DomainError):
    pass


class SingularMatrixError(DomainError):
    pass
