"""
Linear maps on a quantum space.

A SuperOperator is stored as its N x N matrix in the canonical matrix-unit
basis. This module provides the quantum Schur product A . B = m(A (x) B)m*,
the Choi matrix, the three adjoints (GNS, KMS, transpose), the KMS
implementation A~(x) = rho^{1/4} A(rho^{-1/4} x rho^{-1/4}) rho^{1/4}, positivity
and symmetry predicates, and Kraus extraction.

Choi matrices live in M (x) M^op. We represent that algebra on H (x) H with
the op leg transposed: b^op is stored as b^T. Products in M (x) M^op become
ordinary matrix products, and positivity becomes positive semidefiniteness.
"""

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Dict, List, Tuple

import numpy as np
import scipy.linalg

from config.tolerances import ToleranceConfig
from qgraph.algebra import (QuantumSpace, modular_map, mult_adjoint,
                            multiplication_map, gram_gns)
from qgraph.errors import NotCompletelyPositive, SpaceMismatch

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class SuperOperator:
    """A linear map M -> M as a matrix in the canonical basis."""

    space: QuantumSpace
    mat: np.ndarray

    def __post_init__(self):
        if self.mat.shape != (self.space.dim, self.space.dim):
            raise SpaceMismatch(
                f"Matrix of shape {self.mat.shape} on space of dimension {self.space.dim}")

    @classmethod
    def identity(cls, space: QuantumSpace) -> "SuperOperator":
        return cls(space, np.eye(space.dim, dtype=complex))

    @classmethod
    def from_function(cls, space: QuantumSpace,
                      func: Callable[[np.ndarray], np.ndarray]) -> "SuperOperator":
        """Tabulate func on the basis of matrix units."""
        cols = [func(space.basis_element(k)) for k in range(space.dim)]
        return cls(space, np.column_stack(cols).astype(complex))

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.mat @ x

    def __matmul__(self, other: "SuperOperator") -> "SuperOperator":
        _require_same(self, other)
        return SuperOperator(self.space, self.mat @ other.mat)

    def norm(self) -> float:
        return float(np.linalg.norm(self.mat, 2))


@dataclass(frozen=True, eq=False)
class ChoiMatrix:
    """Element of M (x) M^op stored as an n^2 x n^2 matrix on H (x) H."""

    space: QuantumSpace
    mat: np.ndarray

    def hermitian_residual(self) -> float:
        return float(np.linalg.norm(self.mat - self.mat.conj().T, 2))

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh((self.mat + self.mat.conj().T) / 2)

    def support(self, rtol: float = None) -> np.ndarray:
        """Support projection of the (Hermitian part of the) Choi matrix."""
        rtol = ToleranceConfig.resolve('rank_rtol', rtol)
        vals, vecs = np.linalg.eigh((self.mat + self.mat.conj().T) / 2)
        top = np.max(np.abs(vals)) if vals.size else 0.0
        keep = vecs[:, np.abs(vals) > rtol * top] if top > 0 else vecs[:, :0]
        return keep @ keep.conj().T

    def flip(self) -> "ChoiMatrix":
        """Tensor flip a (x) b^op -> b (x) a^op in the transposed-leg storage."""
        n = self.space.hdim
        flipped = self.mat.reshape(n, n, n, n).transpose(3, 2, 1, 0).reshape(n * n, n * n)
        return ChoiMatrix(self.space, flipped)


@dataclass(frozen=True, eq=False)
class OperatorSystem:
    """
    M'-bimodule given by spanning operators S_ab in B(C^{n_a}, C^{n_b}).

    blocks maps (a, b) to a tuple of n_b x n_a matrices. Bases are orthonormal
    for <S, T>_ab = Tr(rho_a^{-1/2} S* rho_b^{-1/2} T) once orthonormalized.
    """

    space: QuantumSpace
    blocks: Dict[Tuple[int, int], Tuple[np.ndarray, ...]] = field(default_factory=dict)

    def embed(self, a: int, b: int, op: np.ndarray) -> np.ndarray:
        """Place S in B(C^{n_a}, C^{n_b}) into B(H)."""
        full = np.zeros((self.space.hdim, self.space.hdim), dtype=complex)
        hb, ha = self.space.h_offsets[b], self.space.h_offsets[a]
        full[hb:hb + self.space.blocks[b], ha:ha + self.space.blocks[a]] = op
        return full

    def operators(self) -> List[np.ndarray]:
        return [self.embed(a, b, op) for (a, b), ops in sorted(self.blocks.items()) for op in ops]

    def dimension(self) -> int:
        return sum(len(ops) for ops in self.blocks.values())

    def _twist(self, a: int, b: int, s: float) -> Tuple[np.ndarray, np.ndarray]:
        """(rho_b^s, rho_a^s) for the weighted inner product on S_ab."""
        return _density_power(self.space, b, s), _density_power(self.space, a, s)

    def weighted_gram(self, a: int, b: int) -> np.ndarray:
        left, right = self._twist(a, b, -0.25)
        vecs = np.column_stack([(left @ op @ right).ravel() for op in self.blocks[(a, b)]])
        return vecs.conj().T @ vecs

    def gram_residual(self) -> Dict[Tuple[int, int], float]:
        return {key: float(np.linalg.norm(self.weighted_gram(*key) - np.eye(len(ops)), 2))
                for key, ops in self.blocks.items() if ops}

    def orthonormalized(self, rtol: float = None) -> "OperatorSystem":
        """Same spans, bases orthonormal for the weighted inner product."""
        rtol = ToleranceConfig.resolve('rank_rtol', rtol)
        result = {}
        for (a, b), ops in self.blocks.items():
            if not ops:
                continue
            left, right = self._twist(a, b, -0.25)
            inv_left, inv_right = self._twist(a, b, 0.25)
            vecs = np.column_stack([(left @ op @ right).ravel() for op in ops])
            basis = scipy.linalg.orth(vecs, rcond=rtol)
            shape = (self.space.blocks[b], self.space.blocks[a])
            result[(a, b)] = tuple(inv_left @ col.reshape(shape) @ inv_right for col in basis.T)
        return OperatorSystem(self.space, result)

    def adjoint(self) -> "OperatorSystem":
        return OperatorSystem(self.space, {(b, a): tuple(op.conj().T for op in ops)
                                           for (a, b), ops in self.blocks.items()})

    def span_projector(self, a: int, b: int, rtol: float = None) -> np.ndarray:
        """Orthogonal projector onto span S_ab inside the n_b*n_a dimensional space."""
        rtol = ToleranceConfig.resolve('rank_rtol', rtol)
        size = self.space.blocks[a] * self.space.blocks[b]
        ops = self.blocks.get((a, b), ())
        if not ops:
            return np.zeros((size, size), dtype=complex)
        basis = scipy.linalg.orth(np.column_stack([op.ravel() for op in ops]), rcond=rtol)
        return basis @ basis.conj().T


def _density_power(space: QuantumSpace, a: int, s: float) -> np.ndarray:
    return space.density_power(s)[a]


def _require_same(first: SuperOperator, second: SuperOperator):
    if not first.space.is_same(second.space):
        raise SpaceMismatch("Superoperators act on different quantum spaces")


@lru_cache(maxsize=64)
def structure_maps(space: QuantumSpace) -> Tuple[np.ndarray, np.ndarray]:
    """(m, m*) for a space, cached per space object."""
    return multiplication_map(space), mult_adjoint(space)


@lru_cache(maxsize=64)
def _embedded_units(space: QuantumSpace) -> Tuple[np.ndarray, ...]:
    return tuple(space.to_matrix(space.basis_element(k)) for k in range(space.dim))


def _kms_intertwiners(space: QuantumSpace) -> Tuple[np.ndarray, np.ndarray]:
    """Matrices of x -> rho^{1/4} x rho^{1/4} and of its inverse."""
    quarter, inv_quarter = space.density_power(0.25), space.density_power(-0.25)
    return space.conjugation(quarter, quarter), space.conjugation(inv_quarter, inv_quarter)


def _transpose_permutation(space: QuantumSpace) -> np.ndarray:
    perm = np.zeros((space.dim, space.dim))
    for k, (a, i, j) in enumerate(space.labels):
        perm[space.index(a, j, i), k] = 1.0
    return perm


def schur_product(first: SuperOperator, second: SuperOperator) -> SuperOperator:
    """Quantum Schur product m(A (x) B)m*."""
    _require_same(first, second)
    m, mstar = structure_maps(first.space)
    return SuperOperator(first.space, m @ np.kron(first.mat, second.mat) @ mstar)


def choi(op: SuperOperator) -> ChoiMatrix:
    """
    Choi matrix by the explicit expansion
    sum_{a,i,j} A(rho^{-1/4} e_ij rho^{-1/4}) (x) (rho^{-1/4} e_ji rho^{-1/4})^op.
    """
    space = op.space
    inv_quarter = space.density_power(-0.25)
    n = space.hdim
    result = np.zeros((n * n, n * n), dtype=complex)
    for a, i, j in space.labels:
        size = space.blocks[a]
        unit_ij = np.zeros((size, size))
        unit_ij[i, j] = 1.0
        blocks = [np.zeros((m, m), dtype=complex) for m in space.blocks]
        blocks[a] = inv_quarter[a] @ unit_ij @ inv_quarter[a]
        image = space.to_matrix(op.mat @ space.from_blocks(blocks))
        blocks[a] = (inv_quarter[a] @ unit_ij.T @ inv_quarter[a]).T
        result += np.kron(image, scipy.linalg.block_diag(*blocks))
    return ChoiMatrix(space, result)


def choi_abstract(op: SuperOperator) -> ChoiMatrix:
    """Choi matrix from (A (x) sigma_{-i/2}) m*(1)."""
    space = op.space
    _, mstar = structure_maps(space)
    tensor = np.kron(op.mat, modular_map(space, -0.5j)) @ (mstar @ space.unit())
    units = _embedded_units(space)
    n = space.hdim
    result = np.zeros((n * n, n * n), dtype=complex)
    for idx in np.flatnonzero(np.abs(tensor) > 0):
        k, l = divmod(int(idx), space.dim)
        result += tensor[idx] * np.kron(units[k], units[l].T)
    return ChoiMatrix(space, result)


def kms_implementation(op: SuperOperator) -> SuperOperator:
    """A~ = iota A iota^-1 with iota(x) = rho^{1/4} x rho^{1/4}."""
    forward, backward = _kms_intertwiners(op.space)
    return SuperOperator(op.space, forward @ op.mat @ backward)


def from_kms_implementation(space: QuantumSpace, mat: np.ndarray) -> SuperOperator:
    """Inverse of kms_implementation."""
    forward, backward = _kms_intertwiners(space)
    return SuperOperator(space, backward @ mat @ forward)


def adjoint_gns(op: SuperOperator) -> SuperOperator:
    gram = gram_gns(op.space)
    return SuperOperator(op.space, np.linalg.solve(gram, op.mat.conj().T @ gram))


def adjoint_kms(op: SuperOperator) -> SuperOperator:
    return from_kms_implementation(op.space, kms_implementation(op).mat.conj().T)


def transpose(op: SuperOperator) -> SuperOperator:
    """A^T(x) = (A*_KMS(x*))*."""
    perm = _transpose_permutation(op.space)
    return SuperOperator(op.space, perm @ adjoint_kms(op).mat.conj() @ perm)


def _scale(mat: np.ndarray) -> float:
    return max(1.0, float(np.linalg.norm(mat, 2)))


def is_completely_positive(op: SuperOperator, tol: float = None) -> bool:
    tol = ToleranceConfig.resolve('tol', tol)
    matrix = choi(op)
    scale = _scale(matrix.mat)
    return (matrix.hermitian_residual() <= tol * scale
            and matrix.eigenvalues()[0] >= -tol * scale)


def is_star_preserving(op: SuperOperator, tol: float = None) -> bool:
    tol = ToleranceConfig.resolve('tol', tol)
    matrix = choi(op)
    return matrix.hermitian_residual() <= tol * _scale(matrix.mat)


def is_kms_symmetric(op: SuperOperator, tol: float = None) -> bool:
    tol = ToleranceConfig.resolve('tol', tol)
    tilde = kms_implementation(op).mat
    return float(np.linalg.norm(tilde - tilde.conj().T, 2)) <= tol * _scale(tilde)


def is_gns_symmetric(op: SuperOperator, tol: float = None) -> bool:
    tol = ToleranceConfig.resolve('tol', tol)
    return float(np.linalg.norm(adjoint_gns(op).mat - op.mat, 2)) <= tol * _scale(op.mat)


def _choi_sectors(space: QuantumSpace):
    """Yield (a, b, indices) for the sector H_b (x) H_a of H (x) H."""
    n = space.hdim
    for b, nb in enumerate(space.blocks):
        for a, na in enumerate(space.blocks):
            hb, ha = space.h_offsets[b], space.h_offsets[a]
            yield a, b, [(hb + p) * n + ha + q for p in range(nb) for q in range(na)]


def kraus_from_choi(op: SuperOperator, tol: float = None, rtol: float = None) -> OperatorSystem:
    """
    Recover the bimodule operators S_ab of a completely positive map.

    Args:
        op: A completely positive map.
        tol: CP tolerance. Defaults to the active profile.
        rtol: Rank threshold relative to the largest Choi eigenvalue.

    Returns:
        OperatorSystem: Operators with
            A_ab(x) = sum_i rho_b^{-1/4} S_i rho_a^{1/4} x rho_a^{1/4} S_i* rho_b^{-1/4}.
            For Schur idempotents the bases are orthonormal.

    Raises:
        NotCompletelyPositive: The Choi matrix is not positive semidefinite.
    """
    if not is_completely_positive(op, tol):
        raise NotCompletelyPositive("Kraus extraction needs a completely positive map")
    rtol = ToleranceConfig.resolve('rank_rtol', rtol)
    space = op.space
    matrix = choi(op).mat
    matrix = (matrix + matrix.conj().T) / 2
    quarter = space.density_power(0.25)

    sectors = []
    for a, b, idx in _choi_sectors(space):
        vals, vecs = np.linalg.eigh(matrix[np.ix_(idx, idx)])
        sectors.append((a, b, vals, vecs))
    top = max(np.max(vals) for _, _, vals, _ in sectors)

    blocks = {}
    if top <= 0:
        return OperatorSystem(space, blocks)
    for a, b, vals, vecs in sectors:
        shape = (space.blocks[b], space.blocks[a])
        ops = tuple(np.sqrt(val) * quarter[b] @ vec.reshape(shape) @ quarter[a]
                    for val, vec in zip(vals, vecs.T) if val > rtol * top)
        if ops:
            blocks[(a, b)] = ops
    logger.debug("Kraus extraction: %s operators over %s block pairs",
                 sum(len(v) for v in blocks.values()), len(blocks))
    return OperatorSystem(space, blocks)


def kraus_operators(op: SuperOperator, tol: float = None) -> List[np.ndarray]:
    """Operators K on H with A(x) = sum K x K*, i.e. K = rho_b^{-1/4} S rho_a^{1/4}."""
    system = kraus_from_choi(op, tol)
    quarter, inv_quarter = op.space.density_power(0.25), op.space.density_power(-0.25)
    return [system.embed(a, b, inv_quarter[b] @ s @ quarter[a])
            for (a, b), ops in sorted(system.blocks.items()) for s in ops]
