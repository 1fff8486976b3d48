"""Tests for spectra, Perron-Frobenius data, bipartiteness and regularity."""
# To run: pytest -s -v --tb=short test_spectral.py

import networkx as nx
import numpy as np
import pytest

from qgraph.algebra import Projection, make_quantum_space
from qgraph.errors import NotConnected, NotUndirected
from qgraph.graph import (adjacency_from_bimodule, complete_graph, from_classical, random_graph,
                          random_qg, trivial_graph, validate)
from qgraph.spectral import (bipartite_block_residuals, bipartite_residuals, cluster_eigenvalues,
                             gns_bipartition_residual, is_bipartite, operator_norm_gns,
                             operator_system_residual, perron_frobenius, regularity, spectrum)
from qgraph.superop import OperatorSystem, SuperOperator


def classical(graph):
    return from_classical(nx.to_numpy_array(graph, dtype=int))


def test_cycle_spectrum():
    data = spectrum(classical(nx.cycle_graph(4)))
    assert np.allclose(data.eigenvalues, [2, 0, 0, -2])
    assert np.isclose(data.top, 2) and data.simple and data.strictly_positive
    assert data.residual < 1e-10


def test_disconnected_spectrum_is_not_simple():
    two_triangles = nx.disjoint_union(nx.cycle_graph(3), nx.cycle_graph(3))
    data = spectrum(classical(two_triangles))
    assert not data.simple


def test_isolated_vertex_breaks_positivity():
    graph = nx.Graph([(0, 1)])
    graph.add_node(2)
    data = spectrum(classical(graph))
    assert data.simple and not data.strictly_positive


@pytest.mark.parametrize("seed", range(4))
def test_spectrum_is_similarity_invariant(seed):
    graph = random_graph((2, 1), seed=seed)
    vals = np.sort(np.linalg.eigvals(graph.adjacency.mat).real)
    assert np.allclose(vals, np.sort(spectrum(graph).eigenvalues), atol=1e-7)


def test_cluster_eigenvalues():
    clusters = cluster_eigenvalues(np.array([1.0, 0.0, 1.0 + 1e-12, 3.0]))
    assert sorted(sorted(c.tolist()) for c in clusters) == [[0, 2], [1], [3]]


def test_perron_frobenius_of_upper_triangular_map():
    space = make_quantum_space([1, 1])
    phi = SuperOperator(space, np.array([[1.0, 1.0], [0.0, 2.0]], dtype=complex))
    pf = perron_frobenius(phi)
    assert np.isclose(pf.r, 2.0)
    assert pf.simple and pf.strictly_positive
    assert pf.residual < 1e-10


@pytest.mark.parametrize("seed", range(3))
def test_perron_frobenius_eigenvector(seed):
    graph = random_graph((2, 2), seed=seed, reflexive=True)
    pf = perron_frobenius(graph.adjacency)
    assert np.linalg.norm(graph.adjacency(pf.x) - pf.r * pf.x) < 1e-8
    assert np.isclose(pf.r, spectrum(graph).top)


@pytest.mark.parametrize("n", [4, 6, 8])
def test_even_cycles_are_bipartite(n):
    graph = classical(nx.cycle_graph(n))
    flag, (p1, p2) = is_bipartite(graph)
    assert flag
    assert np.allclose(p1.coords, [1.0 if k % 2 == 0 else 0.0 for k in range(n)])
    assert np.allclose(p1.coords + p2.coords, 1.0)
    assert operator_system_residual(graph, p1) < 1e-8
    assert gns_bipartition_residual(graph, p1) < 1e-8


@pytest.mark.parametrize("n", [3, 5, 7])
def test_odd_cycles_are_not_bipartite(n):
    assert is_bipartite(classical(nx.cycle_graph(n))) == (False, None)


def test_cycle_colour_classes_have_no_inner_edges():
    graph = classical(nx.cycle_graph(4))
    _, (p1, _) = is_bipartite(graph)
    assert max(bipartite_block_residuals(graph, p1).values()) < 1e-8
    adjacent = Projection(graph.space, np.array([1.0, 1.0, 0.0, 0.0]))
    assert bipartite_block_residuals(graph, adjacent)['block_p'] > 0.5


def test_skewed_quantum_bipartite_graph():
    space = make_quantum_space([2, 1], [np.diag([2.0, 3.0]), np.eye(1)], normalize=True)
    rows = (np.array([[1.0, 0.0]]), np.array([[0.0, 1.0]]))
    system = OperatorSystem(space, {(0, 1): rows, (1, 0): tuple(r.T for r in rows)})
    graph = validate(space, adjacency_from_bimodule(space, system.orthonormalized()))
    assert graph.undirected and not graph.flags['tracial']
    flag, (p1, _) = is_bipartite(graph)
    assert flag
    assert (np.allclose(p1.matrix, np.diag([1.0, 1.0, 0.0]))
            or np.allclose(p1.matrix, np.diag([0.0, 0.0, 1.0])))
    assert max(bipartite_block_residuals(graph, p1).values()) < 1e-8
    assert max(bipartite_residuals(graph, p1).values()) < 1e-8
    assert operator_system_residual(graph, p1) < 1e-8


def test_bipartite_needs_connected_graph():
    with pytest.raises(NotConnected):
        is_bipartite(trivial_graph(make_quantum_space([2])))


def test_bipartite_needs_undirected_graph():
    with pytest.raises(NotUndirected):
        is_bipartite(from_classical([[0, 1, 0], [0, 0, 1], [1, 0, 0]]))


@pytest.mark.parametrize("n, offsets, d", [(5, [1], 2), (6, [1, 3], 3), (7, [1, 2], 4), (8, [1, 3], 4)])
def test_circulant_graphs_are_regular(n, offsets, d):
    graph = classical(nx.circulant_graph(n, offsets))
    assert np.isclose(regularity(graph), d)
    assert np.isclose(operator_norm_gns(graph), d)


def test_path_is_not_regular():
    assert regularity(classical(nx.path_graph(3))) is None


@pytest.mark.parametrize("space", [make_quantum_space([2]),
                                   make_quantum_space([2, 1], [np.diag([2.0, 3.0]), np.eye(1)],
                                                      normalize=True)],
                         ids=["tracial", "skewed"])
def test_complete_graph_regularity(space):
    graph = complete_graph(space)
    d = sum(np.trace(r).real for r in space.rho)
    assert np.isclose(regularity(graph), d)
    assert np.isclose(operator_norm_gns(graph), d)


def test_random_qg_spectrum_is_real():
    data = spectrum(random_qg(3, 2, seed=7))
    assert np.all(np.isreal(data.eigenvalues))
    assert np.all(np.diff(data.eigenvalues) <= 1e-12)
