"""Exception types shared across the package."""


class KreinKernelsError(Exception):
    """Base class for all errors raised by this package."""


class NonHermitian(KreinKernelsError, ValueError):
    """A matrix that must be Hermitian is not, beyond tolerance."""


class NonHermitianKernel(NonHermitian):
    """A kernel fails K(z,w) = K(w,z)^[*] on the chosen points."""


class DimensionMismatch(KreinKernelsError, ValueError):
    pass


class RankAmbiguous(KreinKernelsError, ArithmeticError):
    """An eigenvalue fell inside the guard band around the rank cut.

    The caller should move ``tol`` so that the numerical rank is unambiguous.
    """

    def __init__(self, msg: str, eigenvalue: float):
        super().__init__(msg)
        self.eigenvalue = eigenvalue


class DomainViolation(KreinKernelsError, ValueError):
    pass


class PoleAtAlpha(KreinKernelsError, ZeroDivisionError):
    pass


class UnsupportedFunction(KreinKernelsError, TypeError):
    pass


class SingularResolvent(KreinKernelsError, ArithmeticError):
    """The point is (numerically) an exceptional point of the realization."""


class SingularSResolvent(SingularResolvent):
    pass


class SingularDenominator(KreinKernelsError, ZeroDivisionError):
    pass


class InequalityViolated(KreinKernelsError, ValueError):
    """The model-space inequality has a negative slack eigenvalue."""

    def __init__(self, msg: str, min_eigenvalue: float):
        super().__init__(msg)
        self.min_eigenvalue = min_eigenvalue


class NotCoisometric(KreinKernelsError, ValueError):
    pass


class ZeroDenominator(KreinKernelsError, ZeroDivisionError):
    pass


class NonInvertibleSigma(KreinKernelsError, ArithmeticError):
    pass


class NonIntrinsicPair(KreinKernelsError, ValueError):
    pass


class CenterMismatch(KreinKernelsError, ValueError):
    pass


class NotInImage(KreinKernelsError, ValueError):
    """A complex matrix is not the embedding of a quaternionic matrix."""


class ParseError(KreinKernelsError, ValueError):
    pass
