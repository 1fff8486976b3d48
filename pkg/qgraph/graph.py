"""
Quantum graphs: validated quantum adjacency matrices and canonical constructions.

A quantum graph is a quantum space together with a Schur idempotent A,
m(A (x) A)m* = A. validate() computes every flag eagerly; downstream modules
read the flags instead of re-deriving them.
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, Optional, Sequence, Union

import numpy as np

from config.tolerances import ToleranceConfig
from qgraph.algebra import QuantumSpace, make_quantum_space, random_quantum_space
from qgraph.errors import (BasisNotOrthonormal, DimensionOutOfRange,
                           NonBinaryEntries, NotSchurIdempotent, SpaceMismatch)
from qgraph.superop import (OperatorSystem, SuperOperator, from_kms_implementation,
                            is_completely_positive, is_gns_symmetric, is_kms_symmetric,
                            is_star_preserving, kms_implementation, kraus_from_choi,
                            schur_product)

logger = logging.getLogger(__name__)

FLAG_NAMES = ('real', 'completely_positive', 'undirected', 'gns_symmetric',
              'reflexive', 'irreflexive', 'tracial', 'totally_disconnected')


@dataclass(frozen=True, eq=False)
class QuantumGraph:
    """A quantum space with a validated quantum adjacency matrix."""

    space: QuantumSpace
    adjacency: SuperOperator
    flags: Dict[str, bool]
    residuals: Dict[str, float]
    tol: float

    @property
    def undirected(self) -> bool:
        return self.flags['undirected']

    @property
    def real(self) -> bool:
        return self.flags['real']

    @property
    def gns_symmetric(self) -> bool:
        return self.flags['gns_symmetric']

    @cached_property
    def kms(self) -> SuperOperator:
        """The KMS implementation A~."""
        return kms_implementation(self.adjacency)

    @cached_property
    def operator_system(self) -> OperatorSystem:
        """Quantum relation S; A~(x) = sum S x S* over these operators."""
        return kraus_from_choi(self.adjacency, self.tol)


def _scaled(tol: float, mat: np.ndarray) -> float:
    return tol * max(1.0, float(np.linalg.norm(mat, 2)))


def is_totally_disconnected(op: SuperOperator, tol: float = None) -> bool:
    """A lies in M', i.e. commutes with every left multiplication."""
    tol = ToleranceConfig.resolve('tol', tol)
    space = op.space
    bound = _scaled(tol, op.mat)
    for k in range(space.dim):
        left = space.left_mult(space.basis_element(k))
        if np.linalg.norm(op.mat @ left - left @ op.mat, 2) > bound:
            return False
    return True


def validate(space: QuantumSpace, adjacency: Union[SuperOperator, np.ndarray],
             tol: float = None) -> QuantumGraph:
    """
    Check Schur idempotence and compute all flags.

    Args:
        space: The quantum space.
        adjacency: Candidate adjacency as a SuperOperator or an N x N matrix.
        tol: Identity tolerance. Defaults to the active profile.

    Returns:
        QuantumGraph: The graph with flags and residuals.

    Raises:
        NotSchurIdempotent: ||A . A - A|| exceeds the tolerance.
    """
    tol = ToleranceConfig.resolve('tol', tol)
    if not isinstance(adjacency, SuperOperator):
        adjacency = SuperOperator(space, np.asarray(adjacency, dtype=complex))
    elif not adjacency.space.is_same(space):
        raise SpaceMismatch("Adjacency map belongs to a different quantum space")

    bound = _scaled(tol, adjacency.mat)
    identity = SuperOperator.identity(space)
    idempotence = float(np.linalg.norm(schur_product(adjacency, adjacency).mat - adjacency.mat, 2))
    if idempotence > bound:
        raise NotSchurIdempotent(idempotence, tol)

    with_identity = schur_product(adjacency, identity).mat
    residuals = {
        'schur_idempotence': idempotence,
        'reflexive': float(np.linalg.norm(with_identity - identity.mat, 2)),
        'irreflexive': float(np.linalg.norm(with_identity, 2)),
    }
    flags = {
        'real': is_star_preserving(adjacency, tol),
        'completely_positive': is_completely_positive(adjacency, tol),
        'undirected': is_kms_symmetric(adjacency, tol),
        'gns_symmetric': is_gns_symmetric(adjacency, tol),
        'reflexive': residuals['reflexive'] <= bound,
        'irreflexive': residuals['irreflexive'] <= bound,
        'tracial': space.tracial,
        'totally_disconnected': is_totally_disconnected(adjacency, tol),
    }
    if flags['real'] and not flags['completely_positive']:
        logger.warning("Real quantum adjacency matrix failed the CP check; residuals %s", residuals)
    logger.debug("Validated graph on blocks %s: %s", space.blocks, flags)
    return QuantumGraph(space, adjacency, flags, residuals, tol)


def from_classical(adj: Sequence[Sequence[int]], tol: float = None) -> QuantumGraph:
    """Import a 0/1 adjacency matrix as a quantum graph on (D_n, counting measure)."""
    adj = np.asarray(adj)
    if adj.ndim != 2 or adj.shape[0] != adj.shape[1] or adj.shape[0] == 0:
        raise SpaceMismatch(f"Classical adjacency must be square, got shape {adj.shape}")
    if not np.all((adj == 0) | (adj == 1)):
        raise NonBinaryEntries("Classical adjacency entries must be 0 or 1")
    space = make_quantum_space([1] * adj.shape[0])
    return validate(space, adj.astype(complex), tol)


def complete_adjacency(space: QuantumSpace) -> SuperOperator:
    """K(x) = psi(x) 1."""
    psi_row = np.concatenate([r.T.ravel() for r in space.rho])
    return SuperOperator(space, np.outer(space.unit(), psi_row))


def complete_graph(space: QuantumSpace, tol: float = None) -> QuantumGraph:
    return validate(space, complete_adjacency(space), tol)


def trivial_graph(space: QuantumSpace, tol: float = None) -> QuantumGraph:
    return validate(space, SuperOperator.identity(space), tol)


def adjacency_from_bimodule(space: QuantumSpace, system: OperatorSystem,
                            tol: float = None) -> SuperOperator:
    """
    A_ab(x) = sum_i rho_b^{-1/4} S_i rho_a^{1/4} x rho_a^{1/4} S_i* rho_b^{-1/4}.

    Raises:
        BasisNotOrthonormal: A block basis fails the weighted Gram check.
    """
    tol = ToleranceConfig.resolve('tol', tol)
    for key, residual in system.gram_residual().items():
        if residual > tol:
            raise BasisNotOrthonormal(key, residual)

    tilde = np.zeros((space.dim, space.dim), dtype=complex)
    for (a, b), ops in system.blocks.items():
        rows = slice(space.offsets[b], space.offsets[b] + space.blocks[b] ** 2)
        cols = slice(space.offsets[a], space.offsets[a] + space.blocks[a] ** 2)
        for op in ops:
            tilde[rows, cols] += np.kron(op, op.conj())
    return from_kms_implementation(space, tilde)


def _gue_matrix(n: int, rng: np.random.Generator) -> np.ndarray:
    mat = np.empty((n, n), dtype=complex)
    mat.real = rng.standard_normal((n, n))
    mat.imag = rng.standard_normal((n, n))
    return (mat + mat.conj().T) / 2


def random_qg(n: int, d: int, seed: Optional[int] = None, tol: float = None) -> QuantumGraph:
    """
    Sample from QG(n, d): a random (d+1)-dimensional operator system in M_n.

    The system is span{1, H_1, ..., H_d} with H_i drawn from the GUE, orthonormalized
    with the identity first under <S, T> = (1/n) Tr(S* T), on (M_n, n Tr).

    Raises:
        DimensionOutOfRange: n < 2 or d outside [0, n^2 - 1].
    """
    if n < 2 or not 0 <= d <= n * n - 1:
        raise DimensionOutOfRange(f"QG(n, d) needs n >= 2 and 0 <= d <= n^2 - 1, got n={n}, d={d}")
    rng = np.random.default_rng(seed)
    space = make_quantum_space([n])
    columns = [np.eye(n).ravel()] + [_gue_matrix(n, rng).ravel() for _ in range(d)]
    q, _ = np.linalg.qr(np.column_stack(columns).astype(complex))
    ops = tuple(np.sqrt(n) * q[:, k].reshape(n, n) for k in range(d + 1))
    system = OperatorSystem(space, {(0, 0): ops})
    graph = validate(space, adjacency_from_bimodule(space, system, tol), tol)
    logger.debug("Sampled QG(%s, %s) with seed %s", n, d, seed)
    return graph


def random_operator_system(space: QuantumSpace, seed: Optional[int] = None,
                           undirected: bool = True, density: float = 0.5,
                           reflexive: bool = False) -> OperatorSystem:
    """
    Random M'-bimodule on a space, orthonormalized for adjacency_from_bimodule.

    Each block pair receives a random subspace of dimension drawn uniformly up to
    density * n_a * n_b. With undirected set, S_ba is taken as S_ab*.
    """
    rng = np.random.default_rng(seed)
    blocks = {}
    count = len(space.blocks)
    for a in range(count):
        for b in range(count):
            if undirected and b < a:
                continue
            na, nb = space.blocks[a], space.blocks[b]
            upper = max(1, int(round(density * na * nb)))
            size = int(rng.integers(0, upper + 1))
            ops = [rng.standard_normal((nb, na)) + 1j * rng.standard_normal((nb, na))
                   for _ in range(size)]
            if a == b and reflexive:
                ops.append(np.eye(na, dtype=complex))
            if undirected and a == b:
                ops = ops + [op.conj().T for op in ops]
            if ops:
                blocks[(a, b)] = tuple(ops)
    if undirected:
        for (a, b), ops in list(blocks.items()):
            if a != b:
                blocks[(b, a)] = tuple(op.conj().T for op in ops)
    return OperatorSystem(space, blocks).orthonormalized()


def random_graph(blocks: Sequence[int], seed: Optional[int] = None, tracial: bool = False,
                 undirected: bool = True, density: float = 0.5, reflexive: bool = False,
                 tol: float = None) -> QuantumGraph:
    """Random quantum graph on a random space with the given block sizes."""
    space = random_quantum_space(blocks, seed, tracial)
    system = random_operator_system(space, seed, undirected, density, reflexive)
    return validate(space, adjacency_from_bimodule(space, system, tol), tol)
