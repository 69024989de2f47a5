"""Exception hierarchy shared by every froblab module."""


class FroblabError(Exception):
    """Base class for all library errors."""


# exact arithmetic
class ZeroDenominator(FroblabError, ZeroDivisionError):
    pass


class NotAPerfectSquare(FroblabError):
    pass


class PoleAtPoint(FroblabError, ZeroDivisionError):
    pass


class RegistryMismatch(FroblabError, TypeError):
    pass


# series
class NonUnitDivisor(FroblabError, ZeroDivisionError):
    pass


class RootNotInField(FroblabError):
    pass


class NotExtendable(FroblabError):
    """A transcendental term outside the t0 / log q linear shape was produced."""


# Frobenius data
class DegenerateRelation(FroblabError):
    pass


# canonical frame
class NotSemisimpleAtOrigin(FroblabError):
    pass


class NonCommutingDirections(FroblabError):
    pass


class NotClosed(FroblabError):
    pass


class NormNotASquare(FroblabError):
    pass


class InconsistentOffDiagonal(FroblabError):
    pass


class NonIntegrableDiagonal(FroblabError):
    pass


class SingularJacobian(FroblabError):
    pass


class ConstantRequired(FroblabError):
    """The conformal rule cannot fix an integration constant of weight zero."""


# singularities
class OnCaustic(FroblabError):
    pass


class DegenerateCritical(FroblabError, ZeroDivisionError):
    pass


class RootFindingFailed(FroblabError):
    pass


class IllConditioned(FroblabError):
    pass


# toric
class NonNegativityViolated(FroblabError):
    pass


class NormalFormDivergent(FroblabError):
    pass


class NonUnitLeading(FroblabError):
    pass


# descendant flow
class NoConvergence(FroblabError):
    pass


# cli / config
class UnknownExample(FroblabError):
    pass


class SchemaError(FroblabError):
    def __init__(self, path, message, line=None):
        self.path = path
        self.line = line
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{path}: {message}")
