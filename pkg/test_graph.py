"""Tests for quantum graph validation and the canonical constructions."""
# To run: pytest -s -v --tb=short test_graph.py

import numpy as np
import pytest

from qgraph.algebra import make_quantum_space, random_quantum_space
from qgraph.errors import (BasisNotOrthonormal, DimensionOutOfRange, NonBinaryEntries,
                           NotSchurIdempotent)
from qgraph.graph import (FLAG_NAMES, adjacency_from_bimodule, complete_adjacency, complete_graph,
                          from_classical, random_graph, random_operator_system, random_qg,
                          trivial_graph, validate)
from qgraph.superop import OperatorSystem, kraus_from_choi

C4 = np.array([[0, 1, 0, 1], [1, 0, 1, 0], [0, 1, 0, 1], [1, 0, 1, 0]])


def skewed_space():
    return make_quantum_space([2, 1], [np.diag([2.0, 3.0]), np.eye(1)], normalize=True)


def span_distance(first, second):
    """Largest gap between the block span projectors of two operator systems."""
    keys = set(first.blocks) | set(second.blocks)
    return max((float(np.linalg.norm(first.span_projector(a, b) - second.span_projector(a, b), 2))
                for a, b in keys), default=0.0)


def test_classical_flags():
    graph = from_classical(C4)
    assert set(graph.flags) == set(FLAG_NAMES)
    assert graph.flags['real'] and graph.flags['completely_positive']
    assert graph.undirected and graph.gns_symmetric
    assert graph.flags['irreflexive'] and not graph.flags['reflexive']
    assert graph.flags['tracial']
    assert not graph.flags['totally_disconnected']
    assert graph.residuals['schur_idempotence'] < 1e-12


def test_classical_entries_must_be_binary():
    with pytest.raises(NonBinaryEntries):
        from_classical([[0, 2], [2, 0]])


def test_directed_classical_graph():
    graph = from_classical([[0, 0], [1, 0]])
    assert graph.flags['completely_positive']
    assert not graph.undirected
    assert not graph.gns_symmetric


@pytest.mark.parametrize("space", [make_quantum_space([2]), skewed_space()], ids=["tracial", "skewed"])
def test_complete_and_trivial_graphs(space):
    complete = complete_graph(space)
    assert complete.flags['reflexive'] and complete.undirected and complete.gns_symmetric
    assert not complete.flags['totally_disconnected']
    trivial = trivial_graph(space)
    assert trivial.flags['reflexive'] and trivial.flags['totally_disconnected']
    assert trivial.undirected


@pytest.mark.parametrize("space", [make_quantum_space([2]), skewed_space()], ids=["tracial", "skewed"])
def test_scaled_complete_graph_rejected(space):
    with pytest.raises(NotSchurIdempotent) as info:
        validate(space, 2 * complete_adjacency(space).mat)
    assert info.value.residual > 1.0


def test_complete_graph_residuals():
    graph = complete_graph(make_quantum_space([2]))
    assert graph.residuals['reflexive'] < 1e-12
    assert graph.residuals['irreflexive'] > 0.5


@pytest.mark.parametrize("n, d", [(1, 0), (2, 4), (3, 9), (3, -1)])
def test_random_qg_dimension_checks(n, d):
    with pytest.raises(DimensionOutOfRange):
        random_qg(n, d, seed=0)


@pytest.mark.parametrize("n, d", [(2, 1), (3, 2), (4, 5)])
def test_random_qg_is_undirected(n, d):
    graph = random_qg(n, d, seed=17)
    assert graph.undirected and graph.real and graph.gns_symmetric
    assert graph.flags['tracial']
    assert graph.operator_system.dimension() == d + 1


def test_random_qg_is_reproducible():
    first, second = random_qg(3, 4, seed=2), random_qg(3, 4, seed=2)
    assert np.array_equal(first.adjacency.mat, second.adjacency.mat)


def test_random_qg_zero_is_trivial():
    graph = random_qg(3, 0, seed=1)
    assert np.allclose(graph.adjacency.mat, np.eye(9))


@pytest.mark.parametrize("n", [2, 3])
def test_random_qg_full_dimension_is_complete(n):
    graph = random_qg(n, n * n - 1, seed=5)
    expected = complete_graph(make_quantum_space([n])).adjacency.mat
    assert np.allclose(graph.adjacency.mat, expected, atol=1e-8)


@pytest.mark.parametrize("seed", range(5))
def test_random_skewed_graph_validates(seed):
    graph = random_graph((2, 1), seed=seed)
    assert not graph.flags['tracial']
    assert graph.undirected and graph.real
    assert graph.residuals['schur_idempotence'] < 1e-9


def test_bimodule_round_trip():
    graph = random_graph((2, 2), seed=3, undirected=False)
    rebuilt = adjacency_from_bimodule(graph.space, kraus_from_choi(graph.adjacency))
    assert np.allclose(rebuilt.mat, graph.adjacency.mat)


def test_bimodule_basis_must_be_orthonormal():
    space = make_quantum_space([2])
    system = OperatorSystem(space, {(0, 0): (2 * np.eye(2),)})
    with pytest.raises(BasisNotOrthonormal) as info:
        adjacency_from_bimodule(space, system)
    assert info.value.block == (0, 0)
    # orthonormalizing the same span gives the trivial graph
    adjacency = adjacency_from_bimodule(space, system.orthonormalized())
    assert np.allclose(adjacency.mat, np.eye(4))


@pytest.mark.parametrize("tracial", [True, False], ids=["tracial", "skewed"])
@pytest.mark.parametrize("undirected", [True, False], ids=["undirected", "directed"])
@pytest.mark.parametrize("seed", range(3))
def test_kraus_extraction_recovers_bimodule_spans(tracial, undirected, seed):
    space = random_quantum_space((2, 1), seed=seed, tracial=tracial)
    system = random_operator_system(space, seed, undirected=undirected, reflexive=True)
    recovered = kraus_from_choi(adjacency_from_bimodule(space, system))
    assert span_distance(system, recovered) < 1e-8


@pytest.mark.parametrize("seed", range(3))
def test_undirected_system_is_closed_under_adjoint(seed):
    graph = random_graph((2, 1), seed=seed, reflexive=True)
    system = graph.operator_system
    assert span_distance(system, system.adjoint()) < 1e-8


def test_directed_system_is_not_closed_under_adjoint():
    system = from_classical([[0, 0], [1, 0]]).operator_system
    assert span_distance(system, system.adjoint()) > 0.5
