"""Exception hierarchy shared by the solver modules."""


class MonoQ1Error(Exception):
    """Base class for all errors raised by monoq1."""


class ParameterError(MonoQ1Error, ValueError):
    """A numeric parameter lies outside its admissible domain."""


class GeometryError(MonoQ1Error):
    """Degenerate or inverted element geometry."""

    def __init__(self, message, element=None):
        super().__init__(message)
        self.element = element


class MeshParseError(MonoQ1Error):
    """Malformed mesh file. ``line`` is 1-based, or None if not line specific."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class CoefficientError(MonoQ1Error):
    """Diffusion coefficient is not symmetric positive definite at a sample point."""

    def __init__(self, message, element=None):
        super().__init__(message)
        self.element = element


class AdmissibilityError(MonoQ1Error):
    """|a12| > min(a11, a22) for the effective coefficient of an element."""

    def __init__(self, message, element=None):
        super().__init__(message)
        self.element = element


class EllipticityError(MonoQ1Error):
    """A selected quadrature parameter is not strictly positive."""


class SolverError(MonoQ1Error):
    pass


class NonConvergenceError(SolverError):
    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class DefinitenessError(SolverError):
    """CG met a direction with p^T A p <= 0."""


class SingularMatrixError(SolverError):
    pass


class DimensionCapError(SolverError):
    """Dense routine called on a system larger than its cap."""


class UnknownProblemError(MonoQ1Error, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else ""
