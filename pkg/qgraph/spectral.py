"""
Spectral analysis of quantum adjacency maps.

Spectra are computed on the KMS implementation A~, which is similar to A and
Hermitian in the canonical basis for undirected graphs. The module also provides
Perron-Frobenius data for completely positive maps, bipartiteness with an explicit
bipartition, the operator norm on the GNS space and regularity.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np
import scipy.linalg

from config.tolerances import ToleranceConfig
from qgraph.algebra import Projection, QuantumSpace, gram_gns
from qgraph.errors import NotCompletelyPositive, NotConnected, NotUndirected
from qgraph.graph import QuantumGraph
from qgraph.superop import (SuperOperator, adjoint_gns, is_completely_positive,
                            is_kms_symmetric, kms_implementation)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class PerronFrobenius:
    """Spectral radius r with a positive eigenvector x."""

    r: float
    x: np.ndarray
    simple: bool
    strictly_positive: bool
    residual: float


@dataclass(frozen=True, eq=False)
class SpectralData:
    """Eigenvalues of A~ (descending) with the Perron-Frobenius pair of A~."""

    eigenvalues: np.ndarray
    top: float
    simple: bool
    pf_vector: Optional[np.ndarray]
    strictly_positive: bool
    residual: float


def spectral_diameter(vals: np.ndarray) -> float:
    vals = np.asarray(vals)
    if vals.size < 2:
        return 0.0
    return float(np.max(np.abs(vals[:, None] - vals[None, :])))


def _gap_threshold(vals: np.ndarray, gap_rtol: float) -> float:
    vals = np.asarray(vals)
    if vals.size == 0:
        return 0.0
    # floor keeps rounding noise of a degenerate spectrum in one cluster
    return gap_rtol * max(spectral_diameter(vals), 1e-6 * float(np.max(np.abs(vals))))


def cluster_eigenvalues(vals: np.ndarray, gap_rtol: float = None) -> List[np.ndarray]:
    """Group sorted real eigenvalues where consecutive gaps stay below gap_rtol * diameter."""
    gap_rtol = ToleranceConfig.resolve('gap_rtol', gap_rtol)
    order = np.argsort(vals)
    ordered = np.asarray(vals)[order]
    threshold = _gap_threshold(ordered, gap_rtol)
    splits = np.flatnonzero(np.diff(ordered) > threshold) + 1
    return [order[group] for group in np.split(np.arange(len(ordered)), splits)]


def _near(vals: np.ndarray, target: complex, gap_rtol: float) -> np.ndarray:
    threshold = _gap_threshold(vals, gap_rtol)
    return np.flatnonzero(np.abs(vals - target) <= threshold)


def _positive_part(space: QuantumSpace, x: np.ndarray) -> np.ndarray:
    """Fix the phase by the trace, then keep the Hermitian part."""
    trace = sum(np.trace(b) for b in space.to_blocks(x))
    if abs(trace) > 0:
        x = x * np.conj(trace) / abs(trace)
    x = (x + space.star(x)) / 2
    norm = np.linalg.norm(x)
    return x / norm if norm > 0 else x


def _min_eigenvalue(space: QuantumSpace, x: np.ndarray) -> float:
    return min(np.linalg.eigvalsh((b + b.conj().T) / 2)[0] for b in space.to_blocks(x))


def _perron_frobenius_matrix(space: QuantumSpace, mat: np.ndarray,
                             hermitian: bool) -> PerronFrobenius:
    config = ToleranceConfig.get_config()
    unit = space.unit()
    if hermitian:
        vals, vecs = np.linalg.eigh((mat + mat.conj().T) / 2)
        r = float(vals[-1])
        idx = _near(vals, r, config['gap_rtol'])
        basis = vecs[:, idx]
        x = basis @ (basis.conj().T @ unit)
    else:
        vals, left, right = scipy.linalg.eig(mat, left=True, right=True)
        r = float(np.max(np.abs(vals)))
        idx = _near(vals, r, config['gap_rtol'])
        basis, dual = right[:, idx], left[:, idx]
        pairing = dual.conj().T @ basis
        if np.linalg.cond(pairing) < 1e8:
            x = basis @ np.linalg.solve(pairing, dual.conj().T @ unit)
        else:
            x = basis[:, 0]
    x = _positive_part(space, x)
    strictly_positive = bool(_min_eigenvalue(space, x) > config['positivity_rtol'] * space.norm(x))
    residual = float(np.linalg.norm(mat @ x - r * x))
    return PerronFrobenius(r, x, len(idx) == 1, strictly_positive, residual)


def perron_frobenius(phi: SuperOperator, tol: float = None) -> PerronFrobenius:
    """
    Perron-Frobenius data of a completely positive map.

    For KMS-symmetric maps the eigenproblem is solved on the Hermitian KMS
    implementation and the eigenvector is mapped back; otherwise left and right
    eigenvectors give the spectral projection applied to the unit.

    Raises:
        NotCompletelyPositive: phi is not completely positive.
    """
    if not is_completely_positive(phi, tol):
        raise NotCompletelyPositive("Perron-Frobenius data needs a completely positive map")
    space = phi.space
    if not is_kms_symmetric(phi, tol):
        return _perron_frobenius_matrix(space, phi.mat, hermitian=False)

    data = _perron_frobenius_matrix(space, kms_implementation(phi).mat, hermitian=True)
    inv_quarter = space.density_power(-0.25)
    x = space.conjugation(inv_quarter, inv_quarter) @ data.x
    x = x / np.linalg.norm(x)
    residual = float(np.linalg.norm(phi.mat @ x - data.r * x))
    return PerronFrobenius(data.r, x, data.simple, data.strictly_positive, residual)


def spectrum(graph: QuantumGraph) -> SpectralData:
    """Eigenvalues of A~ and, for real graphs, its Perron-Frobenius pair."""
    tilde = graph.kms.mat
    if graph.undirected:
        vals = np.linalg.eigvalsh((tilde + tilde.conj().T) / 2)[::-1]
    else:
        vals = np.linalg.eigvals(tilde)
        vals = vals[np.lexsort((-vals.imag, -vals.real))]

    if graph.flags['completely_positive']:
        pf = _perron_frobenius_matrix(graph.space, tilde, hermitian=graph.undirected)
        return SpectralData(vals, pf.r, pf.simple, pf.x, pf.strictly_positive, pf.residual)
    top = float(np.max(vals.real))
    simple = len(_near(vals, top, ToleranceConfig.get_config()['gap_rtol'])) == 1
    return SpectralData(vals, top, simple, None, False, float('nan'))


def bipartite_residuals(graph: QuantumGraph, p: Projection) -> Dict[str, float]:
    """Residuals of A~(xp) = A~(x)(1-p), A~(p)p = 0 and A~(1-p)(1-p) = 0."""
    space = graph.space
    tilde = graph.kms.mat
    q = p.complement()
    return {
        'swap': float(np.linalg.norm(tilde @ space.right_mult(p.coords)
                                      - space.right_mult(q.coords) @ tilde, 2)),
        'inner_p': space.norm(space.multiply(tilde @ p.coords, p.coords)),
        'inner_complement': space.norm(space.multiply(tilde @ q.coords, q.coords)),
    }


def bipartite_block_residuals(graph: QuantumGraph, p: Projection) -> Dict[str, float]:
    """||p A~(p)|| and ||(1-p) A~(1-p)||: no edges inside either colour class."""
    space = graph.space
    tilde = graph.kms.mat
    q = p.complement()
    return {
        'block_p': space.norm(space.multiply(p.coords, tilde @ p.coords)),
        'block_complement': space.norm(space.multiply(q.coords, tilde @ q.coords)),
    }


def operator_system_residual(graph: QuantumGraph, p: Projection) -> float:
    """max ||p S p||, ||(1-p) S (1-p)|| over the quantum relation S."""
    proj = p.matrix
    comp = np.eye(graph.space.hdim) - proj
    ops = graph.operator_system.operators()
    if not ops:
        return 0.0
    return float(max(max(np.linalg.norm(proj @ s @ proj, 2),
                         np.linalg.norm(comp @ s @ comp, 2)) for s in ops))


def gns_bipartition_residual(graph: QuantumGraph, p: Projection) -> float:
    """||A R_p - R_{1-p} A|| on the adjacency map itself."""
    space = graph.space
    mat = graph.adjacency.mat
    return float(np.linalg.norm(mat @ space.right_mult(p.coords)
                                - space.right_mult(p.complement().coords) @ mat, 2))


def _self_adjoint_eigenvector(space: QuantumSpace, vecs: np.ndarray) -> np.ndarray:
    best, best_norm = None, -1.0
    for v in vecs.T:
        for part in ((v + space.star(v)) / 2, (v - space.star(v)) / 2j):
            norm = np.linalg.norm(part)
            if norm > best_norm:
                best, best_norm = part / norm, norm
    return best


def is_bipartite(graph: QuantumGraph, tol: float = None) -> Tuple[bool, Optional[Tuple[Projection, Projection]]]:
    """
    Detect -lambda in the spectrum of A~ and extract a bipartition.

    Args:
        graph: A connected undirected quantum graph.
        tol: Identity tolerance for the bipartition checks.

    Returns:
        Tuple: (flag, (p1, p2)) with p1 the support of the positive part of a
            self-adjoint eigenvector for -lambda and p2 = 1 - p1; (False, None)
            when -lambda is absent.

    Raises:
        NotUndirected: The graph is not KMS-symmetric.
        NotConnected: The Perron-Frobenius test shows the graph is disconnected.
    """
    if not graph.undirected:
        raise NotUndirected("Bipartiteness is defined for undirected quantum graphs")
    if not graph.flags['completely_positive']:
        raise NotCompletelyPositive("Bipartiteness needs a real quantum graph")
    config = ToleranceConfig.get_config()
    tol = ToleranceConfig.resolve('tol', tol)
    space = graph.space
    data = spectrum(graph)
    if space.dim > 1 and not (data.simple and data.strictly_positive):
        raise NotConnected("Bipartiteness needs a connected graph")

    lam = data.top
    if lam <= 0:
        return False, None
    tilde = graph.kms.mat
    vals, vecs = np.linalg.eigh((tilde + tilde.conj().T) / 2)
    if abs(vals[0] + lam) > config['bipartite_rtol'] * lam:
        return False, None

    idx = np.flatnonzero(np.abs(vals + lam) <= config['bipartite_rtol'] * lam)
    x = _self_adjoint_eigenvector(space, vecs[:, idx])
    scale = space.norm(x)
    for a, i, j in space.labels:
        coord = x[space.index(a, i, j)]
        if i == j and abs(coord) > config['positivity_rtol'] * scale:
            if coord.real < 0:
                x = -x
            break

    blocks = []
    for b in space.to_blocks(x):
        bvals, bvecs = np.linalg.eigh((b + b.conj().T) / 2)
        keep = bvecs[:, bvals > 0]
        blocks.append(keep @ keep.conj().T)
    p = Projection(space, space.from_blocks(blocks))

    residuals = bipartite_residuals(graph, p)
    if max(residuals.values()) > config['certificate_tol'] * max(1.0, lam):
        logger.warning("Bipartition fails its identities: %s", residuals)
    logger.debug("Bipartite with lambda=%s, rank p1=%s", lam, p.rank)
    return True, (p, p.complement())


def operator_norm_gns(graph: QuantumGraph) -> float:
    """Operator norm of A on L^2(M, psi) via the Cholesky factor of the GNS Gram."""
    factor = scipy.linalg.cholesky(gram_gns(graph.space), lower=True)
    inverse = scipy.linalg.solve_triangular(factor, np.eye(graph.space.dim), lower=True)
    return float(np.linalg.norm(factor.conj().T @ graph.adjacency.mat @ inverse.conj().T, 2))


def regularity(graph: QuantumGraph, tol: float = None) -> Optional[float]:
    """d with A1 = d1 and A*1 = d1 (GNS adjoint), or None."""
    tol = ToleranceConfig.resolve('tol', tol)
    space = graph.space
    unit = space.unit()
    image = graph.adjacency(unit)
    gram = gram_gns(space)
    d = float(np.real((unit.conj() @ gram @ image) / (unit.conj() @ gram @ unit)))
    bound = tol * max(1.0, abs(d))
    co_image = adjoint_gns(graph.adjacency)(unit)
    if d < -bound:
        return None
    if space.norm(image - d * unit) > bound or space.norm(co_image - d * unit) > bound:
        return None
    return max(d, 0.0)
