"""Exception hierarchy shared by all solver modules."""


class ReflectionError(Exception):
    """Base class for every error raised by :mod:`reflectode`."""


class SingularMatrixError(ReflectionError, ArithmeticError):
    """A matrix that must be invertible is (numerically) singular."""


class BranchCutError(ReflectionError, ArithmeticError):
    """A principal square root or logarithm is requested for a matrix with an
    eigenvalue on the closed negative real axis."""


class ConvergenceError(ReflectionError, ArithmeticError):
    """An iteration or series did not reach its tolerance within the cap."""


class PreconditionError(ReflectionError, ValueError):
    """Input data violate a documented precondition (shape, commutativity...)."""


class SingularPathError(SingularMatrixError):
    """The block matrix of even/odd parts is singular somewhere on an
    integration path.

    Attributes:
        s: the offending abscissa.
        det: determinant there, when computed.
        cond: 1-norm condition number when that was the failing test.
    """

    def __init__(self, s, det=None, cond=None):
        self.s = float(s)
        self.det = det
        self.cond = cond
        if cond is None:
            msg = f"block matrix is singular at s = {self.s:.17g}"
        else:
            msg = f"block matrix is numerically singular at s = {self.s:.17g} (condition number {cond:.3e})"
        if det is not None:
            msg += f" (det = {det:.3e})"
        super().__init__(msg)


class UnsolvableBVPError(SingularMatrixError):
    """The boundary matrix C X(-T) + K X(T) is singular."""


class QuadratureError(ConvergenceError):
    """Adaptive quadrature failed to meet its tolerance."""


class UnsupportedCaseError(ReflectionError, NotImplementedError):
    """A mathematically legitimate case that this library deliberately does
    not handle (for instance, 0 as a root of the reduced operator)."""


class DegenerateReductionError(ReflectionError, ValueError):
    """The leading coefficients satisfy a_n**2 == b_n**2, so the order drops
    and the companion reduction does not apply."""
