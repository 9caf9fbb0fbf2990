"""Exception hierarchy shared by all modules."""


class SparseRootsError(Exception):
    """Base class for library errors."""


class ParseError(SparseRootsError, ValueError):
    """Malformed term expression or serialized polynomial."""

    def __init__(self, message: str, position: int = -1):
        self.position = position
        if position >= 0:
            message = f"{message} (at position {position})"
        super().__init__(message)


class ZeroPolynomialError(SparseRootsError, ValueError):
    """The zero polynomial was passed where a nonzero one is required."""


class ChainError(SparseRootsError, ValueError):
    """Derivative-chain step requested on an unsuitable polynomial."""


class DegenerateMultipointError(SparseRootsError, ArithmeticError):
    """Every point of a multipoint set is a root of the polynomial."""


class BoundOverflowError(SparseRootsError, OverflowError):
    """A bound would not fit into a machine integer."""


class ContractError(SparseRootsError, ValueError):
    """A documented precondition of an operation was violated."""


class InvariantViolation(SparseRootsError, AssertionError):
    """An internal invariant failed; indicates a bug, never silently ignored."""


class DensifyError(SparseRootsError, ValueError):
    """Degree exceeds the densification cap of the oracle."""
