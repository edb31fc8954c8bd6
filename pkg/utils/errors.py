"""
Error hierarchy shared by every module.

All errors derive from SpinOptError so the CLI can report the class name
and exit with the domain-error code.
"""


class SpinOptError(ValueError):
    """Base class for domain errors"""

    @property
    def name(self) -> str:
        return type(self).__name__


class NotHermitian(SpinOptError):
    pass


class NotAntiHermitian(SpinOptError):
    pass


class NotUnitary(SpinOptError):
    pass


class NotSpecialUnitary(SpinOptError):
    pass


class NotSymmetricUnitary(SpinOptError):
    pass


class BranchAmbiguity(SpinOptError):
    pass


class DimensionCap(SpinOptError):
    pass


class DimMismatch(SpinOptError):
    pass


class ZeroCoroot(SpinOptError):
    pass


class DegenerateAngle(SpinOptError):
    pass


class FactorizationFail(SpinOptError):
    pass


class FoldFail(SpinOptError):
    pass


class Infeasible(SpinOptError):
    pass


class NonGenericSystem(SpinOptError):
    pass


class NotInCartanSubalgebra(SpinOptError):
    pass


class Uncontrollable(SpinOptError):
    pass


class NotReached(SpinOptError):
    pass


class UnknownSystem(SpinOptError):
    pass


class UnknownTolerance(SpinOptError):
    pass


class MalformedInput(SpinOptError):
    pass
