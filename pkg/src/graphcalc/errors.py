"""Exception types raised across graphcalc."""
from __future__ import annotations


class GraphCalcError(ValueError):
    """Base class for every error raised by this package."""


class ExtentMismatch(GraphCalcError):
    def __init__(self, label, first: int, second: int, where: str = ""):
        self.label = label
        self.extents = (first, second)
        msg = f"extent mismatch for label {label!r}: {first} vs {second}"
        if where:
            msg += f" ({where})"
        super().__init__(msg)


class UnknownOutputLabel(GraphCalcError):
    pass


class EmptyOperands(GraphCalcError):
    pass


class RankMismatch(GraphCalcError):
    pass


class ShapeMismatch(GraphCalcError):
    pass


class InvalidPermutation(GraphCalcError):
    pass


class CapExceeded(GraphCalcError):
    """Dense materialization would exceed the configured entry cap."""


class BudgetExceeded(GraphCalcError):
    """A contraction plan costs more multiply-adds than the budget allows."""


class InvalidSignature(GraphCalcError):
    pass


class ShapeContractError(GraphCalcError):
    """Operands violate the shape contract of a product or identity."""


class TensorFormatError(GraphCalcError):
    pass


class DiagramError(GraphCalcError):
    pass


class DanglingPort(DiagramError):
    pass


class PortReuse(DiagramError):
    pass


class NoMatch(DiagramError):
    """A rewrite rule was asked to fire where its pattern does not match."""


class DimsListMismatch(NoMatch):
    pass


class ParseError(GraphCalcError):
    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"{message} at position {position}"
        super().__init__(message)


class UnknownIdentity(GraphCalcError):
    pass


class UnknownBuiltin(ParseError):
    pass
