"""Tests for quantum spaces, the multiplication map and projections."""
# To run: pytest -s -v --tb=short test_algebra.py

import numpy as np
import pytest

from qgraph.algebra import (Projection, functional, gram_gns, gram_kms, make_quantum_space,
                            modular_map, mult_adjoint, multiplication_map,
                            random_quantum_space)
from qgraph.errors import NonPositiveDensity, OneFormViolation, SpaceMismatch

SPACE_BLOCKS = [(1, 1), (2,), (2, 1), (3, 2, 1)]


@pytest.fixture(params=[(blocks, tracial) for blocks in SPACE_BLOCKS for tracial in (True, False)],
                ids=lambda p: f"{p[0]}-{'tracial' if p[1] else 'skewed'}")
def space(request):
    blocks, tracial = request.param
    return random_quantum_space(blocks, seed=3, tracial=tracial)


def random_element(space, rng):
    return rng.standard_normal(space.dim) + 1j * rng.standard_normal(space.dim)


def test_tracial_default_density():
    space = make_quantum_space([2, 1])
    assert space.tracial
    assert np.allclose(space.rho[0], 2 * np.eye(2))
    assert space.dim == 5 and space.hdim == 3


def test_one_form_violation_without_normalize():
    with pytest.raises(OneFormViolation):
        make_quantum_space([2], [np.diag([2.0, 3.0])])


def test_normalize_rescales_density():
    space = make_quantum_space([2], [np.diag([2.0, 3.0])], normalize=True)
    assert np.isclose(np.trace(np.linalg.inv(space.rho[0])).real, 1.0)
    assert not space.tracial


@pytest.mark.parametrize("rho", [np.diag([1.0, -1.0]), np.array([[1.0, 1.0], [0.0, 1.0]])])
def test_non_positive_density_rejected(rho):
    with pytest.raises(NonPositiveDensity):
        make_quantum_space([2], [rho], normalize=True)


def test_block_shape_mismatch():
    with pytest.raises(SpaceMismatch):
        make_quantum_space([2, 1], [2 * np.eye(2)])


def test_one_form_and_coassociativity(space):
    m, mstar = multiplication_map(space), mult_adjoint(space)
    assert np.linalg.norm(m @ mstar - np.eye(space.dim), 2) <= 1e-12
    eye = np.eye(space.dim)
    left = np.kron(mstar, eye) @ mstar
    right = np.kron(eye, mstar) @ mstar
    assert np.linalg.norm(left - right, 2) <= 1e-12


def test_mult_adjoint_is_gns_adjoint(space):
    rng = np.random.default_rng(0)
    m, mstar = multiplication_map(space), mult_adjoint(space)
    gram = gram_gns(space)
    x, y, z = (random_element(space, rng) for _ in range(3))
    lhs = np.vdot(m @ np.kron(x, y), gram @ z)
    rhs = np.vdot(np.kron(x, y), np.kron(gram, gram) @ (mstar @ z))
    assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(lhs))


def test_multiplication_map_matches_multiply(space):
    rng = np.random.default_rng(1)
    x, y = random_element(space, rng), random_element(space, rng)
    assert np.allclose(multiplication_map(space) @ np.kron(x, y), space.multiply(x, y))


def test_left_and_right_multiplication(space):
    rng = np.random.default_rng(2)
    x, y = random_element(space, rng), random_element(space, rng)
    assert np.allclose(space.left_mult(x) @ y, space.multiply(x, y))
    assert np.allclose(space.right_mult(x) @ y, space.multiply(y, x))


def test_functional_of_unit_and_gram(space):
    rng = np.random.default_rng(4)
    x, y = random_element(space, rng), random_element(space, rng)
    assert np.isclose(functional(space, space.multiply(space.star(x), y)),
                      np.vdot(x, gram_gns(space) @ y))
    assert np.isclose(functional(space, space.unit()), sum(np.trace(r) for r in space.rho))


def test_gram_kms_equals_gns_when_tracial():
    space = make_quantum_space([3, 1])
    assert np.allclose(gram_kms(space), gram_gns(space))


def test_modular_group(space):
    assert np.allclose(modular_map(space, 0), np.eye(space.dim))
    composed = modular_map(space, 0.3) @ modular_map(space, -0.5j)
    assert np.allclose(composed, modular_map(space, 0.3 - 0.5j))
    # sigma_{-i} fixes the density itself
    rho = space.density_element()
    assert np.allclose(modular_map(space, -1j) @ rho, rho)


@pytest.mark.parametrize("z", [0.25j, -0.25j, 0.5j, -0.5j, 1.0])
def test_modular_map_is_multiplicative(space, z):
    rng = np.random.default_rng(5)
    x, y = random_element(space, rng), random_element(space, rng)
    sigma = modular_map(space, z)
    lhs = sigma @ space.multiply(x, y)
    rhs = space.multiply(sigma @ x, sigma @ y)
    assert np.linalg.norm(lhs - rhs) <= 1e-9 * max(1.0, np.linalg.norm(lhs))


def test_skewed_two_by_two_values():
    space = make_quantum_space([2], [np.diag([3.0, 1.5])])
    e11, e12 = space.basis_element(space.index(0, 0, 0)), space.basis_element(space.index(0, 0, 1))
    assert np.isclose(functional(space, e11), 3.0)
    assert np.allclose(modular_map(space, -0.5j) @ e12, np.sqrt(2) * e12)
    assert np.isclose(np.vdot(e12, gram_gns(space) @ e12), 1.5)
    assert np.isclose(np.vdot(e12, gram_kms(space) @ e12), 3 / np.sqrt(2))


def test_projection_support_and_complement():
    space = make_quantum_space([2, 1])
    x = space.from_blocks([np.diag([3.0, 0.0]), np.array([[2.0]])])
    p = Projection.support(space, x)
    assert p.rank == 2
    assert p.residual() < 1e-12
    assert p.is_nontrivial()
    q = p.complement()
    assert q.rank == 1
    assert np.allclose(q.matrix, np.diag([0.0, 1.0, 0.0]))
    assert not Projection(space, space.unit()).is_nontrivial()


def test_projection_from_matrix_keeps_diagonal_blocks():
    space = make_quantum_space([1, 1])
    p = Projection.from_matrix(space, np.array([[1.0, 0.0], [0.0, 0.0]]))
    assert np.allclose(p.coords, [1.0, 0.0])


def test_random_space_is_reproducible():
    first = random_quantum_space([2, 2], seed=9)
    second = random_quantum_space([2, 2], seed=9)
    assert all(np.allclose(a, b) for a, b in zip(first.rho, second.rho))
    assert not first.tracial
