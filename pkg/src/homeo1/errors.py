"""Exception types raised by the toolkit."""


class GeometryError(Exception):
    code = "GEOMETRY_ERROR"


class CoincidentPoints(GeometryError):
    code = "COINCIDENT_POINTS"


class BadWitness(GeometryError):
    code = "BAD_WITNESS"


class ConstraintViolation(GeometryError):
    code = "CONSTRAINT_VIOLATION"


class RootNotBracketed(GeometryError):
    code = "ROOT_NOT_BRACKETED"


class MissingTangent(GeometryError):
    code = "MISSING_TANGENT"

    def __init__(self, message: str, index: int | None = None, residual: float | None = None):
        super().__init__(message)
        self.index = index
        self.residual = residual


class DegenerateSequence(GeometryError):
    code = "DEGENERATE_SEQUENCE"


class BadSandwich(GeometryError):
    code = "BAD_SANDWICH"


class NotConvergent(GeometryError):
    code = "NOT_CONVERGENT"


class InsufficientPoints(GeometryError):
    code = "INSUFFICIENT_POINTS"
