"""Exception types shared across the package."""


class KKGeomError(Exception):
    """Base class for all package errors."""


class StructuralError(KKGeomError):
    """Array dimensions or block layout do not match the declared algebra."""


class DegenerateMetricError(KKGeomError):
    """A metric block is singular within tolerance."""


class DegenerateCoframeError(KKGeomError):
    """The coframe matrix is singular at an evaluation point."""

    def __init__(self, point, det):
        self.point = tuple(float(x) for x in point)
        self.det = float(det)
        super().__init__(
            f"coframe matrix is degenerate at point {self.point} (det = {self.det:.3e})"
        )


class ExprSyntaxError(KKGeomError):
    """Syntax error in a field expression, with the byte offset of the bad token."""

    def __init__(self, message, offset):
        self.offset = offset
        super().__init__(f"{message} (offset {offset})")


class UnknownIdentifierError(KKGeomError):
    """An identifier could not be resolved to a variable, parameter or function."""

    def __init__(self, name):
        self.name = name
        super().__init__(f"unknown identifier: {name!r}")


class EvalDomainError(KKGeomError):
    """Evaluation left the real domain (log of a negative number, etc.)."""


class DegreeError(KKGeomError):
    """Operation applied to a form of unsupported degree."""


class IntegratorError(KKGeomError):
    """Path lifting drifted off the group manifold beyond tolerance."""
