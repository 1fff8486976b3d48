"""
Connectivity of quantum graphs.

Several independent deciders are provided and can be cross-checked:

- irreducibility of A as a completely positive map, with a witnessing projection
- the kernel algebra {y : A~(xy) = A~(x)y} and the nullity of the Laplacian
- the Burnside closure of the quantum relation S together with M'
- the joint support of the Choi matrices of the composition powers A^k
- the Perron-Frobenius criterion for undirected graphs

Disconnected graphs come with a reducing projection p. For undirected graphs p
commutes with A~ in the sense A~(xp) = A~(x)p; for directed graphs p satisfies
A~(px) = pA~(px), the strong-connectivity reading.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg

from config.tolerances import ToleranceConfig
from qgraph.algebra import Projection, QuantumSpace, gram_gns, make_quantum_space
from qgraph.errors import (MethodDisagreement, NotAHomomorphismOfAlgebras,
                           NotCompletelyPositive, NotGnsSymmetric, NotUndirected)
from qgraph.graph import QuantumGraph, trivial_graph
from qgraph.spectral import cluster_eigenvalues, spectrum
from qgraph.superop import (OperatorSystem, SuperOperator, choi, is_completely_positive,
                            is_kms_symmetric, kms_implementation, kraus_operators,
                            schur_product)

logger = logging.getLogger(__name__)

METHODS = ('irreducibility', 'laplacian', 'burnside', 'choi_support', 'spectral')

CONNECTED, DISCONNECTED, INAPPLICABLE = 'connected', 'disconnected', 'inapplicable'


# Linear algebra helpers

def _null_space(mat: np.ndarray, threshold: float) -> np.ndarray:
    """Columns spanning {v : mat v = 0}, singular values up to an absolute threshold."""
    _, s, vh = np.linalg.svd(mat, full_matrices=True)
    rank = int(np.sum(s > threshold))
    return vh[rank:].conj().T


def _span(vectors: np.ndarray, threshold: float) -> np.ndarray:
    """Orthonormal columns spanning the columns of vectors."""
    if vectors.size == 0:
        return vectors.reshape(vectors.shape[0], 0)
    u, s, _ = np.linalg.svd(vectors, full_matrices=False)
    return u[:, s > threshold]


def _orthogonal_residual(basis: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    for _ in range(2):
        vectors = vectors - basis @ (basis.conj().T @ vectors)
    return vectors


def _commutator_columns(space: QuantumSpace, mat: np.ndarray) -> np.ndarray:
    """Column k is vec(T R_k - R_k T) for the matrix unit e_k."""
    cols = []
    for k in range(space.dim):
        right = space.right_mult(space.basis_element(k))
        cols.append((mat @ right - right @ mat).ravel())
    return np.column_stack(cols)


def _commutation_kernel(space: QuantumSpace, mat: np.ndarray, rtol: float = None) -> np.ndarray:
    rtol = ToleranceConfig.resolve('rank_rtol', rtol)
    threshold = rtol * max(float(np.linalg.norm(mat, 2)), 1.0)
    basis = _null_space(_commutator_columns(space, mat), threshold)
    logger.debug("Commutation kernel of dimension %s in M of dimension %s",
                 basis.shape[1], space.dim)
    return basis


# Kernel algebra and Laplacian

def kernel_algebra(graph: QuantumGraph, rtol: float = None) -> np.ndarray:
    """
    Orthonormal basis of {y in M : A~(xy) = A~(x)y for all x}.

    The columns are coordinate vectors, orthonormal for the trace. The span is a
    unital *-subalgebra of M; its closure residuals are logged when they exceed
    the certificate tolerance.

    Raises:
        NotUndirected: The graph is not KMS-symmetric.
    """
    if not graph.undirected:
        raise NotUndirected("The kernel algebra is defined for undirected quantum graphs")
    space = graph.space
    basis = _commutation_kernel(space, graph.kms.mat, rtol)
    residuals = algebra_residuals(space, basis)
    if max(residuals.values()) > ToleranceConfig.get_config()['certificate_tol']:
        logger.warning("Kernel algebra fails its closure checks: %s", residuals)
    return basis


def algebra_residuals(space: QuantumSpace, basis: np.ndarray) -> Dict[str, float]:
    """Distance of 1, products and adjoints from the span of basis."""
    def outside(x: np.ndarray) -> float:
        return float(np.linalg.norm(x - basis @ (basis.conj().T @ x)))

    elements = list(basis.T)
    return {
        'unit': outside(space.unit()),
        'product': max((outside(space.multiply(x, y)) for x in elements for y in elements),
                       default=0.0),
        'adjoint': max((outside(space.star(x)) for x in elements), default=0.0),
    }


def _gradient(graph: QuantumGraph) -> np.ndarray:
    """Matrix of y -> [A, R_y], columns indexed by the basis of M."""
    return _commutator_columns(graph.space, graph.adjacency.mat)


def laplacian(graph: QuantumGraph) -> np.ndarray:
    """
    The Laplacian as an N x N matrix on M.

    Delta = grad* grad with the adjoint taken from the GNS inner product on M and
    the Hilbert-Schmidt inner product on coordinate matrices.

    Raises:
        NotGnsSymmetric: The adjacency map is not GNS-symmetric.
    """
    if not graph.gns_symmetric:
        raise NotGnsSymmetric("The Laplacian is defined for GNS-symmetric quantum graphs")
    grad = _gradient(graph)
    return np.linalg.solve(gram_gns(graph.space), grad.conj().T @ grad)


def laplacian_nullity(graph: QuantumGraph, rtol: float = None) -> int:
    """
    Dimension of ker Delta.

    The count uses the singular values of the gradient whitened by the Cholesky
    factor of the GNS Gram; their squares are the eigenvalues of Delta.

    Raises:
        NotGnsSymmetric: The adjacency map is not GNS-symmetric.
    """
    if not graph.gns_symmetric:
        raise NotGnsSymmetric("The Laplacian is defined for GNS-symmetric quantum graphs")
    rtol = ToleranceConfig.resolve('rank_rtol', rtol)
    space = graph.space
    factor = scipy.linalg.cholesky(gram_gns(space), lower=True)
    inverse = scipy.linalg.solve_triangular(factor, np.eye(space.dim), lower=True)
    whitened = _gradient(graph) @ inverse.conj().T
    s = np.linalg.svd(whitened, compute_uv=False)
    top = float(s[0]) if s.size else 0.0
    threshold = rtol * max(top, graph.adjacency.norm(), 1.0)
    nullity = int(space.dim - np.sum(s > threshold))
    logger.debug("Laplacian nullity %s (smallest kept singular value threshold %.3e)",
                 nullity, threshold)
    return nullity


# Burnside closure

def _closure(space: QuantumSpace, ops: Sequence[np.ndarray], rtol: float = None) -> np.ndarray:
    """Orthonormal basis (as n^2-vectors) of the algebra generated by ops and M'."""
    rtol = ToleranceConfig.resolve('rank_rtol', rtol)
    n = space.hdim
    generators = []
    for op in ops:
        norm = np.linalg.norm(op, 2)
        if norm > 0:
            generators.append(op / norm)
    for a, size in enumerate(space.blocks):
        unit = np.zeros((n, n), dtype=complex)
        offset = space.h_offsets[a]
        unit[offset:offset + size, offset:offset + size] = np.eye(size)
        generators.append(unit)

    basis = _span(np.column_stack([g.ravel() for g in generators]), rtol)
    frontier = basis
    while frontier.shape[1] and basis.shape[1] < n * n:
        products = np.column_stack([(g @ f.reshape(n, n)).ravel()
                                    for g in generators for f in frontier.T])
        fresh = _span(_orthogonal_residual(basis, products), rtol)
        fresh = _span(_orthogonal_residual(basis, fresh), rtol)
        basis = np.hstack([basis, fresh])
        frontier = fresh
    logger.debug("Closure of %s generators has dimension %s of %s",
                 len(generators), basis.shape[1], n * n)
    return basis


def burnside_generates(system: OperatorSystem, rtol: float = None) -> Tuple[bool, int]:
    """Whether S together with M' generates B(H), with the closure dimension."""
    n = system.space.hdim
    dim = _closure(system.space, system.operators(), rtol).shape[1]
    return dim == n * n, dim


def _commutant_eigenspace(space: QuantumSpace, generators: Sequence[np.ndarray],
                          rtol: float, seed: int) -> np.ndarray:
    n = space.hdim
    eye = np.eye(n)
    stack = np.vstack([np.kron(eye, g.T) - np.kron(g, eye) for g in generators])
    commutant = _null_space(stack, rtol * max(1.0, float(np.linalg.norm(stack, 2))))
    rng = np.random.default_rng(seed)
    coeffs = rng.standard_normal(commutant.shape[1]) + 1j * rng.standard_normal(commutant.shape[1])
    element = (commutant @ coeffs).reshape(n, n)
    element = element - np.trace(element) / n * eye
    shifted = element - np.linalg.eigvals(element)[0] * eye
    _, s, vh = np.linalg.svd(shifted)
    keep = max(1, int(np.sum(s <= 1e-8 * max(1.0, s[0]))))
    return vh[n - keep:].conj().T


def _invariant_projection(space: QuantumSpace, ops: Sequence[np.ndarray],
                          rtol: float = None, seed: int = 0) -> Optional[Projection]:
    """
    Non-trivial projection p in M with (1-p) K p = 0 for every K in ops, or None.

    A proper closure either has a non-zero radical, whose range is invariant, or
    is semisimple with a non-trivial commutant, whose eigenspaces are invariant.
    """
    rtol = ToleranceConfig.resolve('rank_rtol', rtol)
    n = space.hdim
    basis = _closure(space, ops, rtol)
    if basis.shape[1] == n * n:
        return None

    mats = [col.reshape(n, n) for col in basis.T]
    trace_form = np.array([[np.trace(x @ y) for y in mats] for x in mats])
    radical = _null_space(trace_form, rtol * max(1.0, float(np.linalg.norm(trace_form, 2))))
    if radical.shape[1]:
        elements = [sum(c * m for c, m in zip(coeffs, mats)) for coeffs in radical.T]
        subspace = _span(np.hstack(elements), rtol * max(1.0, max(np.linalg.norm(e, 2)
                                                                  for e in elements)))
        logger.debug("Closure has a radical of dimension %s", radical.shape[1])
    else:
        subspace = _commutant_eigenspace(space, mats, rtol, seed)
        logger.debug("Closure is semisimple; invariant subspace of dimension %s",
                     subspace.shape[1])
    return Projection.from_matrix(space, subspace @ subspace.conj().T)


# Reducing projections

def _kernel_projection(space: QuantumSpace, basis: np.ndarray,
                       gap_rtol: float = None) -> Optional[Projection]:
    """A non-trivial projection inside the *-algebra spanned by basis, or None."""
    if basis.shape[1] <= 1:
        return None
    unit = space.unit()
    unit_norm2 = float(np.real(unit.conj() @ unit))

    def project(x: np.ndarray) -> np.ndarray:
        y = basis @ (basis.conj().T @ x)
        return y - (unit.conj() @ y) / unit_norm2 * unit

    element = None
    for a, i, j in space.labels:
        if i != j:
            continue
        y = project(space.basis_element(space.index(a, i, i)))
        if np.linalg.norm(y) > 1e-6:
            element = (y + space.star(y)) / 2
            break
    if element is None:
        y = max((project(col) for col in basis.T), key=np.linalg.norm)
        hermitian, skew = (y + space.star(y)) / 2, (y - space.star(y)) / 2j
        element = hermitian if np.linalg.norm(hermitian) >= np.linalg.norm(skew) else skew

    vals, vecs = np.linalg.eigh(space.to_matrix(element))
    clusters = cluster_eigenvalues(vals, gap_rtol)
    top = next(c for c in clusters if len(vals) - 1 in c)
    chosen = vecs[:, top]
    return Projection.from_matrix(space, chosen @ chosen.conj().T)


def reducing_projection(graph: QuantumGraph) -> Optional[Projection]:
    """
    A non-trivial projection witnessing that the graph is disconnected, or None.

    For undirected graphs the projection lies in the kernel algebra. For directed
    graphs it spans a subspace invariant under the quantum relation S.
    """
    if graph.undirected:
        return _kernel_projection(graph.space, kernel_algebra(graph))
    return _invariant_projection(graph.space, graph.operator_system.operators())


def kms_commutation_residual(graph: QuantumGraph, p: Projection) -> float:
    """||A~ R_p - R_p A~||."""
    right = graph.space.right_mult(p.coords)
    tilde = graph.kms.mat
    return float(np.linalg.norm(tilde @ right - right @ tilde, 2))


def strong_residual(graph: QuantumGraph, p: Projection) -> float:
    """||(I - L_p) A~ L_p||."""
    left = graph.space.left_mult(p.coords)
    return float(np.linalg.norm((np.eye(graph.space.dim) - left) @ graph.kms.mat @ left, 2))


def modular_right_residual(graph: QuantumGraph, p: Projection) -> float:
    """||A R_q - R_q A|| for q = rho^{1/4} p rho^{-1/4}."""
    space = graph.space
    quarter, inv_quarter = space.density_power(0.25), space.density_power(-0.25)
    q = space.from_blocks([u @ b @ v for u, b, v in
                           zip(quarter, space.to_blocks(p.coords), inv_quarter)])
    right = space.right_mult(q)
    mat = graph.adjacency.mat
    return float(np.linalg.norm(mat @ right - right @ mat, 2))


# Irreducibility

def reducibility_residuals(phi: SuperOperator, p: Projection) -> Dict[str, float]:
    """
    Residuals of the five equivalent reducibility conditions for Phi and p.

    bounded: (1-p)Phi(p)(1-p) = 0, i.e. Phi(p) <= Cp
    corner: Phi(pMp) in pMp
    right: Phi(xp) = Phi(xp)p
    left: Phi(px) = pPhi(px)
    support: Phi(p)(1-p) = 0
    """
    space = phi.space
    eye = np.eye(space.dim)
    comp = p.complement().coords
    image = phi(p.coords)
    left, right = space.left_mult(p.coords), space.right_mult(p.coords)
    corner = left @ right
    return {
        'bounded': space.norm(space.multiply(space.multiply(comp, image), comp)),
        'corner': float(np.linalg.norm((eye - corner) @ phi.mat @ corner, 2)),
        'right': float(np.linalg.norm((eye - right) @ phi.mat @ right, 2)),
        'left': float(np.linalg.norm((eye - left) @ phi.mat @ left, 2)),
        'support': space.norm(space.multiply(image, comp)),
    }


def is_irreducible(phi: SuperOperator, tol: float = None) -> Tuple[bool, Optional[Projection]]:
    """
    Decide whether a completely positive map admits no non-trivial p with Phi(p)(1-p) = 0.

    KMS-symmetric maps are searched through the kernel algebra of Phi~ and the
    projection found there is pulled back to the support of rho^{-1/4} p rho^{-1/4}.
    Other maps are searched for an invariant subspace of their Kraus operators.

    Returns:
        Tuple: (True, None) or (False, p) with p satisfying the reducibility conditions.

    Raises:
        NotCompletelyPositive: phi is not completely positive.
    """
    if not is_completely_positive(phi, tol):
        raise NotCompletelyPositive("Irreducibility is defined for completely positive maps")
    space = phi.space
    if space.dim == 1:
        return True, None

    if is_kms_symmetric(phi, tol):
        tilde = kms_implementation(phi).mat
        p = _kernel_projection(space, _commutation_kernel(space, tilde))
        if p is None:
            return True, None
        inv_quarter = space.density_power(-0.25)
        pulled = space.from_blocks([u @ b @ u for u, b in
                                    zip(inv_quarter, space.to_blocks(p.coords))])
        witness = Projection.support(space, pulled)
    else:
        witness = _invariant_projection(space, kraus_operators(phi, tol))
        if witness is None:
            return True, None

    residuals = reducibility_residuals(phi, witness)
    bound = ToleranceConfig.get_config()['certificate_tol'] * max(1.0, phi.norm())
    if max(residuals.values()) > bound:
        logger.warning("Reducing projection fails the reducibility conditions: %s", residuals)
    logger.debug("Reducible map, witness of rank %s", witness.rank)
    return False, witness


# Choi support sequence

class ChoiSupport(NamedTuple):
    projections: List[np.ndarray]
    sup: np.ndarray
    full: bool
    ranks: List[int]


def choi_support_sequence(graph: QuantumGraph, kmax: int = None,
                          rtol: float = None) -> ChoiSupport:
    """
    Support projections p_k of Choi(A^k) for composition powers, with their join.

    The sequence stops once the joint range stops growing; from then on the
    span of the words of length at most k in S no longer changes.
    """
    rtol = ToleranceConfig.resolve('rank_rtol', rtol)
    space = graph.space
    size = space.hdim ** 2
    kmax = size if kmax is None else kmax
    threshold = 1e3 * rtol
    power = graph.adjacency
    projections, ranks = [], []
    joint = np.zeros((size, 0), dtype=complex)
    for k in range(1, kmax + 1):
        if k > 1:
            power = power @ graph.adjacency
            norm = power.norm()
            if norm == 0:
                break
            power = SuperOperator(power.space, (1.0 / norm) * power.mat)
        support = choi(power).support(rtol)
        projections.append(support)
        fresh = _span(_orthogonal_residual(joint, _span(support, 0.5)), threshold)
        ranks.append(joint.shape[1] + fresh.shape[1])
        if not fresh.shape[1] and k > 1:
            break
        joint = np.hstack([joint, fresh])
        if joint.shape[1] == size:
            break
    sup = joint @ joint.conj().T
    logger.debug("Choi support ranks %s of %s", ranks, size)
    return ChoiSupport(projections, sup, joint.shape[1] == size, ranks)


# Homomorphisms

@dataclass(frozen=True, eq=False)
class Homomorphism:
    """A map f from the target algebra to the source algebra, as an N_s x N_t matrix."""

    source: QuantumGraph
    target: QuantumGraph
    mat: np.ndarray

    @property
    def kms(self) -> np.ndarray:
        """f~ = iota_s f iota_t^-1."""
        src, tgt = self.source.space, self.target.space
        quarter, inv_quarter = src.density_power(0.25), tgt.density_power(-0.25)
        return src.conjugation(quarter, quarter) @ self.mat @ tgt.conjugation(inv_quarter, inv_quarter)

    @property
    def kms_adjoint(self) -> np.ndarray:
        """f* = iota_t^-1 f~^H iota_s, a map from the source to the target algebra."""
        src, tgt = self.source.space, self.target.space
        quarter, inv_quarter = src.density_power(0.25), tgt.density_power(-0.25)
        return (tgt.conjugation(inv_quarter, inv_quarter) @ self.kms.conj().T
                @ src.conjugation(quarter, quarter))

    @classmethod
    def onto_two_points(cls, source: QuantumGraph, p1: Projection,
                        target: Optional[QuantumGraph] = None) -> "Homomorphism":
        """
        f(e_i) = rho^{-1/4} p_i rho^{-1/4} with p_2 = 1 - p_1.

        The target defaults to the trivial graph on two points, so that f~(e_i) = p_i.
        """
        space = source.space
        if target is None:
            target = trivial_graph(make_quantum_space([1, 1]))
        inv_quarter = space.density_power(-0.25)
        cols = []
        for p in (p1, p1.complement()):
            cols.append(space.from_blocks([u @ b @ u for u, b in
                                           zip(inv_quarter, space.to_blocks(p.coords))]))
        return cls(source, target, np.column_stack(cols))


@dataclass(frozen=True)
class HomomorphismCheck:
    valid: bool
    residual: float
    surjective: Optional[bool] = None
    tau_residual: Optional[float] = None
    schur_residual: Optional[float] = None

    def __bool__(self) -> bool:
        return self.valid


def verify_homomorphism(source: QuantumGraph, target: QuantumGraph,
                        f: Union[Homomorphism, np.ndarray], tol: float = None) -> HomomorphismCheck:
    """
    Check that f~ is a unital *-homomorphism and A_t . (f* A_s f) = f* A_s f.

    For the two-point trivial target, also report surjectivity, the trace test
    tau(p1 A~(p2)) = tau(p2 A~(p1)) = 0 and, on tracial spaces, ||(ff*) . A - A||.

    Raises:
        NotAHomomorphismOfAlgebras: f~ is not unital, multiplicative or *-preserving.
    """
    tol = ToleranceConfig.resolve('tol', tol)
    hom = f if isinstance(f, Homomorphism) else Homomorphism(source, target, np.asarray(f, dtype=complex))
    src, tgt = source.space, target.space
    tilde = hom.kms
    bound = tol * max(1.0, float(np.linalg.norm(tilde, 2)))

    checks = {'unital': src.norm(tilde @ tgt.unit() - src.unit())}
    units = [tgt.basis_element(k) for k in range(tgt.dim)]
    checks['multiplicative'] = max(src.norm(tilde @ tgt.multiply(x, y)
                                            - src.multiply(tilde @ x, tilde @ y))
                                   for x in units for y in units)
    checks['star'] = max(src.norm(tilde @ tgt.star(x) - src.star(tilde @ x)) for x in units)
    for check, residual in checks.items():
        if residual > bound:
            raise NotAHomomorphismOfAlgebras(check, residual)

    pulled = SuperOperator(tgt, hom.kms_adjoint @ source.adjacency.mat @ hom.mat)
    residual = float(np.linalg.norm(schur_product(target.adjacency, pulled).mat - pulled.mat, 2))
    valid = residual <= tol * max(1.0, pulled.norm())
    result = HomomorphismCheck(valid, residual)

    if tgt.blocks == (1, 1) and target.flags['reflexive'] and target.flags['totally_disconnected']:
        p1, p2 = Projection(src, tilde[:, 0]), Projection(src, tilde[:, 1])
        kms = source.kms.mat
        tau = max(abs(np.sum(np.diag(src.to_matrix(src.multiply(p1.coords, kms @ p2.coords))))),
                  abs(np.sum(np.diag(src.to_matrix(src.multiply(p2.coords, kms @ p1.coords))))))
        schur = None
        if src.tracial:
            both = SuperOperator(src, hom.mat @ hom.kms_adjoint)
            schur = float(np.linalg.norm(schur_product(both, source.adjacency).mat
                                         - source.adjacency.mat, 2))
        result = HomomorphismCheck(valid, residual,
                                   surjective=p1.is_nontrivial(tol) and p2.is_nontrivial(tol),
                                   tau_residual=float(tau), schur_residual=schur)
    logger.debug("Homomorphism check: %s", result)
    return result


# Decision

@dataclass
class ConnectivityReport:
    """Verdicts per method with the certificates they produced."""

    connected: bool
    method: str
    verdicts: Dict[str, str] = field(default_factory=dict)
    projection: Optional[Projection] = None
    witness: Optional[Projection] = None
    kernel_dimension: Optional[int] = None
    laplacian_nullity: Optional[int] = None
    burnside_dimension: Optional[int] = None
    support_ranks: Optional[List[int]] = None
    support_full: Optional[bool] = None
    perron_frobenius: Optional[Dict[str, float]] = None
    residuals: Dict[str, float] = field(default_factory=dict)
    agreement: bool = True


def _applicable(graph: QuantumGraph, method: str) -> bool:
    if method == 'laplacian':
        return graph.gns_symmetric
    if method == 'spectral':
        return graph.undirected
    return True


def _run_method(graph: QuantumGraph, method: str, report: ConnectivityReport, tol: float) -> bool:
    if method == 'irreducibility':
        flag, witness = is_irreducible(graph.adjacency, tol)
        report.witness = witness
        if witness is not None:
            report.residuals['reducibility'] = max(reducibility_residuals(graph.adjacency, witness).values())
        if graph.undirected:
            report.kernel_dimension = kernel_algebra(graph).shape[1]
        return flag
    if method == 'laplacian':
        report.laplacian_nullity = laplacian_nullity(graph)
        return report.laplacian_nullity == 1
    if method == 'burnside':
        flag, report.burnside_dimension = burnside_generates(graph.operator_system)
        return flag
    if method == 'choi_support':
        support = choi_support_sequence(graph)
        report.support_ranks, report.support_full = support.ranks, support.full
        return support.full
    if method == 'spectral':
        data = spectrum(graph)
        report.perron_frobenius = {'r': data.top, 'simple': data.simple,
                                   'strictly_positive': data.strictly_positive,
                                   'residual': data.residual}
        return data.simple and data.strictly_positive
    raise ValueError(f"Unknown connectivity method: {method}")


def connected(graph: QuantumGraph, method: str = 'auto', cross_check: bool = False,
              tol: float = None) -> ConnectivityReport:
    """
    Decide connectivity of a real quantum graph.

    Args:
        graph: A quantum graph with a completely positive adjacency map.
        method: 'auto' or one of METHODS. 'auto' uses irreducibility for
            undirected graphs and Burnside closure for directed ones.
        cross_check: Run every applicable method and require agreement.
        tol: Identity tolerance. Defaults to the active profile.

    Returns:
        ConnectivityReport: Verdicts, certificates and residuals.

    Raises:
        NotCompletelyPositive: The adjacency map is not completely positive.
        NotUndirected: The spectral method was requested on a directed graph.
        NotGnsSymmetric: The Laplacian method was requested on a graph that is not GNS-symmetric.
        MethodDisagreement: Two applicable methods returned different verdicts.
    """
    tol = ToleranceConfig.resolve('tol', tol)
    if not graph.flags['completely_positive']:
        raise NotCompletelyPositive("Connectivity is defined for real quantum graphs")
    if method == 'auto':
        method = 'irreducibility' if graph.undirected else 'burnside'
    if method not in METHODS:
        raise ValueError(f"Unknown connectivity method: {method}")
    if not _applicable(graph, method):
        if method == 'spectral':
            raise NotUndirected("The spectral criterion needs an undirected graph")
        raise NotGnsSymmetric("The Laplacian criterion needs a GNS-symmetric graph")

    report = ConnectivityReport(connected=True, method=method)
    if graph.space.dim == 1:
        report.verdicts = {m: CONNECTED for m in (METHODS if cross_check else (method,))}
        return report

    to_run = [m for m in METHODS if _applicable(graph, m)] if cross_check else [method]
    outcomes = {}
    for name in to_run:
        outcomes[name] = _run_method(graph, name, report, tol)
        report.verdicts[name] = CONNECTED if outcomes[name] else DISCONNECTED
    if cross_check:
        for name in METHODS:
            report.verdicts.setdefault(name, INAPPLICABLE)

    report.agreement = len(set(outcomes.values())) == 1
    if not report.agreement:
        first = next(m for m in to_run if outcomes[m])
        second = next(m for m in to_run if not outcomes[m])
        raise MethodDisagreement(first, second, report.verdicts, report.residuals)

    report.connected = outcomes[method]
    if not report.connected:
        projection = reducing_projection(graph)
        report.projection = projection
        if projection is not None:
            report.residuals['strong'] = strong_residual(graph, projection)
            if graph.undirected:
                report.residuals['kms_commutation'] = kms_commutation_residual(graph, projection)
                report.residuals['modular_right'] = modular_right_residual(graph, projection)
            bound = ToleranceConfig.get_config()['certificate_tol'] * max(1.0, graph.kms.norm())
            if max(report.residuals.values()) > bound:
                logger.warning("Reducing projection fails its defining identity: %s",
                               report.residuals)
    logger.debug("Connectivity by %s: %s", to_run, report.verdicts)
    return report


# Components

def _center(space: QuantumSpace, basis: np.ndarray, rtol: float) -> np.ndarray:
    """Basis of the center of the algebra spanned by basis."""
    elements = list(basis.T)
    rows = [np.column_stack([space.multiply(x, y) - space.multiply(y, x) for x in elements])
            for y in elements]
    coeffs = _null_space(np.vstack(rows), rtol * max(1.0, len(elements)))
    center = basis @ coeffs
    return center if center.shape[1] else space.unit()[:, None] / np.linalg.norm(space.unit())


def connected_components(graph: QuantumGraph, central: bool = False, seed: int = 0,
                         rtol: float = None) -> List[Projection]:
    """
    Pairwise orthogonal projections of the kernel algebra summing to 1.

    By default these are a maximal family of minimal projections p with
    A~(xp) = A~(x)p; with central set they are the minimal central projections.
    Both choices coincide when the kernel algebra is commutative.
    They differ otherwise: on the trivial graph over M_2 the centre is
    one-dimensional, so central=True returns the unit alone while the
    default returns two rank-one projections.

    Raises:
        NotUndirected: The graph is not KMS-symmetric.
    """
    rtol = ToleranceConfig.resolve('rank_rtol', rtol)
    space = graph.space
    basis = kernel_algebra(graph, rtol)
    if central:
        basis = _center(space, basis, rtol)

    rng = np.random.default_rng(seed)
    coeffs = rng.standard_normal(basis.shape[1]) + 1j * rng.standard_normal(basis.shape[1])
    element = basis @ coeffs
    element = (element + space.star(element)) / 2

    vals, vecs = np.linalg.eigh(space.to_matrix(element))
    components = []
    for cluster in cluster_eigenvalues(vals):
        chosen = vecs[:, cluster]
        components.append(Projection.from_matrix(space, chosen @ chosen.conj().T))

    def first_index(p: Projection) -> int:
        diag = np.abs(np.diag(p.matrix))
        return int(np.flatnonzero(diag > 0.5 * diag.max())[0])

    components.sort(key=first_index)
    total = sum(p.coords for p in components)
    if space.norm(total - space.unit()) > ToleranceConfig.get_config()['certificate_tol']:
        logger.warning("Components do not sum to the unit")
    logger.debug("%s components (central=%s)", len(components), central)
    return components
