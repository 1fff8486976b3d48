"""Exceptions raised by the quantum graph toolkit."""

from typing import Optional


class QuantumGraphError(ValueError):
    """Base class for every error raised by the library."""


class NonPositiveDensity(QuantumGraphError):
    """A block density is not Hermitian positive definite."""


class OneFormViolation(QuantumGraphError):
    """Tr(rho_a^-1) differs from 1 on some block."""


class SpaceMismatch(QuantumGraphError):
    """Operands live on different quantum spaces or have the wrong shape."""


class NotCompletelyPositive(QuantumGraphError):
    """The Choi matrix of a map has a negative eigenvalue."""


class NotSchurIdempotent(QuantumGraphError):
    """m(A (x) A)m* differs from A."""

    def __init__(self, residual: float, tol: float):
        self.residual = residual
        self.tol = tol
        super().__init__(
            f"Not a Schur idempotent: residual {residual:.3e} exceeds tolerance {tol:.1e}")


class NonBinaryEntries(QuantumGraphError):
    """A classical adjacency matrix has entries outside {0, 1}."""


class BasisNotOrthonormal(QuantumGraphError):
    """An operator system basis fails the weighted orthonormality check."""

    def __init__(self, block: tuple, residual: float):
        self.block = block
        self.residual = residual
        super().__init__(
            f"Operator system basis of block pair {block} is not orthonormal "
            f"(Gram residual {residual:.3e})")


class DimensionOutOfRange(QuantumGraphError):
    """Random model parameters outside 2 <= n, 0 <= d <= n^2 - 1."""


class NotUndirected(QuantumGraphError):
    """The operation needs a KMS-symmetric adjacency map."""


class NotGnsSymmetric(QuantumGraphError):
    """The operation needs a GNS-symmetric adjacency map."""


class NotConnected(QuantumGraphError):
    """The operation needs a connected graph."""


class NotAHomomorphismOfAlgebras(QuantumGraphError):
    """The KMS implementation of a map is not a unital *-homomorphism."""

    def __init__(self, check: str, residual: float):
        self.check = check
        self.residual = residual
        super().__init__(
            f"KMS implementation fails {check} (residual {residual:.3e})")


class MethodDisagreement(QuantumGraphError):
    """Two connectivity methods returned different verdicts."""

    def __init__(self, first: str, second: str, verdicts: dict, residuals: Optional[dict] = None):
        self.first = first
        self.second = second
        self.verdicts = verdicts
        self.residuals = residuals or {}
        super().__init__(
            f"Methods '{first}' ({verdicts.get(first)}) and '{second}' "
            f"({verdicts.get(second)}) disagree")


class ParseError(QuantumGraphError):
    """A graph file could not be parsed."""

    def __init__(self, message: str, position: str):
        self.position = position
        super().__init__(f"{message} at {position}")
