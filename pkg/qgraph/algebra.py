"""
Finite-dimensional quantum spaces.

A quantum space is a block algebra M = M_{n_1} (+) ... (+) M_{n_d} together with
a faithful positive functional psi(x) = sum_a Tr(rho_a x_a). The functional is
a 1-form when Tr(rho_a^-1) = 1 on every block, which is exactly the condition
mm* = id for the multiplication map.

Elements of M are stored as length-N complex coordinate vectors in the basis of
matrix units e_ij^a ordered lexicographically by (a, i, j). In this basis the
reference trace tau = (+)_a Tr has the identity as Gram matrix, so tracial
adjoints are conjugate transposes.

Key Features:
- Block/coordinate conversions and the standard representation on H = (+) C^{n_a}
- Modular group sigma_z, GNS and KMS Gram matrices
- Multiplication map m and its adjoint m*
- Projections with support and complement helpers
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from config.tolerances import ToleranceConfig
from qgraph.errors import NonPositiveDensity, OneFormViolation, SpaceMismatch

logger = logging.getLogger(__name__)


def hermitian_power(mat: np.ndarray, s: complex) -> np.ndarray:
    """Principal power of a positive-definite Hermitian matrix via eigh."""
    vals, vecs = np.linalg.eigh(mat)
    return (vecs * np.exp(s * np.log(vals))) @ vecs.conj().T


@dataclass(frozen=True, eq=False)
class QuantumSpace:
    """Block algebra with a 1-form; immutable once built by make_quantum_space."""

    blocks: Tuple[int, ...]
    rho: Tuple[np.ndarray, ...]

    @cached_property
    def dim(self) -> int:
        return sum(n * n for n in self.blocks)

    @cached_property
    def hdim(self) -> int:
        return sum(self.blocks)

    @cached_property
    def offsets(self) -> List[int]:
        return list(np.cumsum([0] + [n * n for n in self.blocks])[:-1])

    @cached_property
    def h_offsets(self) -> List[int]:
        return list(np.cumsum([0] + list(self.blocks))[:-1])

    @cached_property
    def tracial(self) -> bool:
        return all(np.allclose(r, n * np.eye(n), atol=1e-12)
                   for n, r in zip(self.blocks, self.rho))

    @cached_property
    def labels(self) -> List[Tuple[int, int, int]]:
        """Basis labels (a, i, j) in canonical order."""
        return [(a, i, j) for a, n in enumerate(self.blocks)
                for i in range(n) for j in range(n)]

    def index(self, a: int, i: int, j: int) -> int:
        return self.offsets[a] + i * self.blocks[a] + j

    def is_same(self, other: "QuantumSpace") -> bool:
        return self is other or (
            self.blocks == other.blocks
            and all(np.allclose(r, s, atol=1e-12) for r, s in zip(self.rho, other.rho)))

    # Coordinates

    def to_blocks(self, x: np.ndarray) -> List[np.ndarray]:
        x = np.asarray(x)
        if x.shape != (self.dim,):
            raise SpaceMismatch(f"Element of shape {x.shape} on space of dimension {self.dim}")
        return [x[o:o + n * n].reshape(n, n) for o, n in zip(self.offsets, self.blocks)]

    def from_blocks(self, blocks: Sequence[np.ndarray]) -> np.ndarray:
        if len(blocks) != len(self.blocks) or any(
                np.shape(b) != (n, n) for b, n in zip(blocks, self.blocks)):
            raise SpaceMismatch(f"Block shapes do not match {self.blocks}")
        return np.concatenate([np.asarray(b, dtype=complex).ravel() for b in blocks])

    def to_matrix(self, x: np.ndarray) -> np.ndarray:
        """Standard representation: x as a block-diagonal operator on H."""
        return scipy.linalg.block_diag(*self.to_blocks(x)).astype(complex)

    def from_matrix(self, mat: np.ndarray) -> np.ndarray:
        """Diagonal blocks of an operator on H, as an element of M."""
        return self.from_blocks([mat[o:o + n, o:o + n]
                                 for o, n in zip(self.h_offsets, self.blocks)])

    def unit(self) -> np.ndarray:
        return self.from_blocks([np.eye(n) for n in self.blocks])

    def basis_element(self, k: int) -> np.ndarray:
        e = np.zeros(self.dim, dtype=complex)
        e[k] = 1.0
        return e

    def multiply(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return self.from_blocks([a @ b for a, b in zip(self.to_blocks(x), self.to_blocks(y))])

    def star(self, x: np.ndarray) -> np.ndarray:
        return self.from_blocks([b.conj().T for b in self.to_blocks(x)])

    def norm(self, x: np.ndarray) -> float:
        """C*-norm: largest block spectral norm."""
        return max(np.linalg.norm(b, 2) for b in self.to_blocks(x))

    # Densities and multiplication operators

    def density_power(self, s: complex) -> List[np.ndarray]:
        return [hermitian_power(r, s) for r in self.rho]

    def density_element(self, s: complex = 1.0) -> np.ndarray:
        return self.from_blocks(self.density_power(s))

    def left_mult(self, x: np.ndarray) -> np.ndarray:
        """Matrix of L_x: y -> xy."""
        return scipy.linalg.block_diag(
            *[np.kron(b, np.eye(n)) for b, n in zip(self.to_blocks(x), self.blocks)])

    def right_mult(self, x: np.ndarray) -> np.ndarray:
        """Matrix of R_x: y -> yx."""
        return scipy.linalg.block_diag(
            *[np.kron(np.eye(n), b.T) for b, n in zip(self.to_blocks(x), self.blocks)])

    def conjugation(self, left: Sequence[np.ndarray], right: Sequence[np.ndarray]) -> np.ndarray:
        """Matrix of the block-preserving map y -> left_a y_a right_a."""
        return scipy.linalg.block_diag(*[np.kron(u, v.T) for u, v in zip(left, right)])


def make_quantum_space(blocks: Sequence[int], rho: Optional[Sequence[np.ndarray]] = None,
                       normalize: bool = False, tol: float = None) -> QuantumSpace:
    """
    Build a quantum space and check the 1-form condition.

    Args:
        blocks: Block sizes n_a >= 1.
        rho: Optional per-block densities. Defaults to the tracial n_a * I.
        normalize: Rescale each rho_a by Tr(rho_a^-1) instead of rejecting it.
        tol: Tolerance for the 1-form check. Defaults to the active profile.

    Returns:
        QuantumSpace: The validated space.

    Raises:
        NonPositiveDensity: A density is not Hermitian positive definite.
        OneFormViolation: Tr(rho_a^-1) != 1 and normalize is unset.
    """
    tol = ToleranceConfig.resolve('tol', tol)
    pd_rtol = ToleranceConfig.get_config()['pd_rtol']
    blocks = tuple(int(n) for n in blocks)
    if not blocks or any(n < 1 for n in blocks):
        raise SpaceMismatch(f"Block sizes must be positive integers, got {list(blocks)}")

    if rho is None:
        rho = [n * np.eye(n) for n in blocks]
    if len(rho) != len(blocks):
        raise SpaceMismatch(f"{len(rho)} densities given for {len(blocks)} blocks")

    checked = []
    for a, (n, r) in enumerate(zip(blocks, rho)):
        r = np.asarray(r, dtype=complex)
        if r.shape != (n, n):
            raise SpaceMismatch(f"Density {a} has shape {r.shape}, expected {(n, n)}")
        scale = max(1.0, np.linalg.norm(r, 2))
        if np.linalg.norm(r - r.conj().T, 2) > tol * scale:
            raise NonPositiveDensity(f"Density {a} is not Hermitian")
        r = (r + r.conj().T) / 2
        vals = np.linalg.eigvalsh(r)
        if vals[0] <= pd_rtol * vals[-1] or vals[-1] <= 0:
            raise NonPositiveDensity(
                f"Density {a} is not positive definite (eigenvalues {vals[0]:.3e}..{vals[-1]:.3e})")
        trace_inv = float(np.sum(1.0 / vals))
        if normalize:
            r = trace_inv * r
        elif abs(trace_inv - 1.0) > tol:
            raise OneFormViolation(
                f"Block {a}: Tr(rho^-1) = {trace_inv:.12g}, expected 1")
        checked.append(r)

    space = QuantumSpace(blocks, tuple(checked))
    logger.debug("Built quantum space blocks=%s tracial=%s", blocks, space.tracial)
    return space


def functional(space: QuantumSpace, x: np.ndarray) -> complex:
    """psi(x) = sum_a Tr(rho_a x_a)."""
    return complex(sum(np.trace(r @ b) for r, b in zip(space.rho, space.to_blocks(x))))


def modular_map(space: QuantumSpace, z: complex) -> np.ndarray:
    """Matrix of sigma_z(x) = rho^{iz} x rho^{-iz}."""
    return space.conjugation(space.density_power(1j * z), space.density_power(-1j * z))


def gram_gns(space: QuantumSpace) -> np.ndarray:
    """Gram matrix of <x, y> = psi(x* y), which is the matrix of R_rho."""
    return space.right_mult(space.density_element())


def gram_kms(space: QuantumSpace) -> np.ndarray:
    """Gram matrix of <x, y>_KMS = sum_a Tr(rho^{1/2} x* rho^{1/2} y)."""
    half = space.density_power(0.5)
    return space.conjugation(half, half)


def multiplication_map(space: QuantumSpace) -> np.ndarray:
    """Matrix of m: M (x) M -> M in the product basis (k, l) -> k * N + l."""
    size = space.dim
    m = np.zeros((size, size * size), dtype=complex)
    for a, n in enumerate(space.blocks):
        for i in range(n):
            for j in range(n):
                for l in range(n):
                    m[space.index(a, i, l), space.index(a, i, j) * size + space.index(a, j, l)] = 1.0
    return m


def mult_adjoint(space: QuantumSpace) -> np.ndarray:
    """Matrix of m*(e_ij^a) = sum_k e_ik^a rho_a^-1 (x) e_kj^a."""
    size = space.dim
    mstar = np.zeros((size * size, size), dtype=complex)
    for a, inv in enumerate(space.density_power(-1.0)):
        n = space.blocks[a]
        for i in range(n):
            for j in range(n):
                col = space.index(a, i, j)
                for k in range(n):
                    for l in range(n):
                        mstar[space.index(a, i, l) * size + space.index(a, k, j), col] += inv[k, l]
    return mstar


@dataclass(frozen=True, eq=False)
class Projection:
    """A self-adjoint idempotent p of a quantum space."""

    space: QuantumSpace
    coords: np.ndarray

    @classmethod
    def from_matrix(cls, space: QuantumSpace, mat: np.ndarray) -> "Projection":
        return cls(space, space.from_matrix(mat))

    @classmethod
    def support(cls, space: QuantumSpace, x: np.ndarray, rtol: float = None) -> "Projection":
        """Projection onto the range of a Hermitian element x."""
        rtol = ToleranceConfig.resolve('rank_rtol', rtol)
        decomps = [np.linalg.eigh((b + b.conj().T) / 2) for b in space.to_blocks(x)]
        top = max(np.max(np.abs(vals)) for vals, _ in decomps)
        blocks = []
        for vals, vecs in decomps:
            keep = vecs[:, np.abs(vals) > rtol * top]
            blocks.append(keep @ keep.conj().T)
        return cls(space, space.from_blocks(blocks))

    @cached_property
    def matrix(self) -> np.ndarray:
        return self.space.to_matrix(self.coords)

    @cached_property
    def rank(self) -> int:
        return int(round(np.real(np.trace(self.matrix))))

    def complement(self) -> "Projection":
        return Projection(self.space, self.space.unit() - self.coords)

    def residual(self) -> float:
        """max(||p^2 - p||, ||p* - p||)."""
        p = self.coords
        return max(self.space.norm(self.space.multiply(p, p) - p),
                   self.space.norm(self.space.star(p) - p))

    def is_nontrivial(self, tol: float = None) -> bool:
        tol = ToleranceConfig.resolve('tol', tol)
        return (self.space.norm(self.coords) > tol
                and self.space.norm(self.coords - self.space.unit()) > tol)


def random_quantum_space(blocks: Sequence[int], seed: int = None,
                         tracial: bool = False) -> QuantumSpace:
    """Sample a space with the given blocks; non-tracial densities are normalized."""
    if tracial:
        return make_quantum_space(blocks)
    rng = np.random.default_rng(seed)
    rho = []
    for n in blocks:
        g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        rho.append(g @ g.conj().T / n + 0.5 * np.eye(n))
    return make_quantum_space(blocks, rho, normalize=True)
