"""Algebra-core invariants: ladder relations, structural functions, u(N), lifts."""

import itertools
import math

import numpy as np
import pytest

from effres.operators import (
    CompositeSpace,
    OperatorMatrix,
    Representation,
    StructuralFunction,
    atomic_transition,
    build_ladder,
    collective_un,
    commutator,
    level_population,
    lift,
    occupation_vectors,
)

TOL = 1e-12


def interior_norm(op, mask):
    """Frobenius norm restricted to interior rows and columns."""
    m = mask.array.diagonal().real
    return np.linalg.norm(m[:, None] * op.array * m[None, :])


LADDER_REPS = (
    [Representation.boson(n) for n in range(0, 11, 2)]
    + [Representation.spin(a) for a in range(1, 4)]
    + [Representation.euclid(m) for m in (1, 4, 10)]
)


@pytest.mark.parametrize("rep", LADDER_REPS, ids=lambda r: f"{r.kind}{r.dim}")
def test_ladder_commutation_relations(rep):
    lad = build_ladder(rep)
    assert commutator(lad.x0, lad.plus).array == pytest.approx(lad.plus.array, abs=TOL)
    assert commutator(lad.x0, lad.minus).array == pytest.approx(-lad.minus.array, abs=TOL)


@pytest.mark.parametrize("rep", LADDER_REPS, ids=lambda r: f"{r.kind}{r.dim}")
def test_structural_function_matches_product(rep):
    lad = build_ladder(rep)
    phi_mat = OperatorMatrix.diagonal(lad.phi(rep.numeric_labels()))
    diff = lad.plus @ lad.minus - phi_mat
    assert interior_norm(diff, lad.interior) <= TOL


@pytest.mark.parametrize("rep", LADDER_REPS, ids=lambda r: f"{r.kind}{r.dim}")
def test_commutator_polynomial_is_phi_difference(rep):
    lad = build_ladder(rep)
    p_mat = OperatorMatrix.diagonal(lad.phi.difference(rep.numeric_labels()))
    diff = commutator(lad.plus, lad.minus) - p_mat
    assert interior_norm(diff, lad.interior) <= TOL


@pytest.mark.parametrize("rep", LADDER_REPS, ids=lambda r: f"{r.kind}{r.dim}")
def test_minus_is_adjoint_of_plus(rep):
    lad = build_ladder(rep)
    assert np.array_equal(lad.minus.array, lad.plus.array.conj().T)


@pytest.mark.parametrize("rep", LADDER_REPS, ids=lambda r: f"{r.kind}{r.dim}")
def test_phi_nonnegative_on_labels(rep):
    lad = build_ladder(rep)
    assert np.all(lad.phi(rep.numeric_labels()) >= -TOL)


def test_spin_phi_values_single_atom():
    lad = build_ladder(Representation.spin(1))
    # S = 1/2: phi(-1/2) = 0 (annihilates the bottom), phi(1/2) = 1
    assert lad.phi(-0.5) == pytest.approx(0.0, abs=TOL)
    assert lad.phi(0.5) == pytest.approx(1.0, abs=TOL)


def test_spin_commutator_is_twice_sz():
    lad = build_ladder(Representation.spin(1))
    assert commutator(lad.plus, lad.minus).array == pytest.approx(
        2.0 * lad.x0.array, abs=TOL)


def test_boson_phi_is_number_operator():
    lad = build_ladder(Representation.boson(3))
    # phi(n) = n, so the commutator polynomial is the constant -1: [a^dag, a] = -1
    labels = np.arange(4.0)
    assert lad.phi(labels) == pytest.approx(labels)
    assert lad.phi.difference(labels) == pytest.approx(-np.ones(4))


def test_boson_truncation_corrupts_only_top_row():
    lad = build_ladder(Representation.boson(5))
    c = commutator(lad.minus, lad.plus).array  # [a, a^dag] = 1 in the interior
    assert c[:5, :5] == pytest.approx(np.eye(5), abs=TOL)
    assert c[5, 5] == pytest.approx(-5.0)


def test_euclid_shift_identity_inside():
    lad = build_ladder(Representation.euclid(5))
    prod = (lad.plus @ lad.minus).array
    assert prod[1:, 1:] == pytest.approx(np.eye(10), abs=TOL)
    assert prod[0, 0] == pytest.approx(0.0)


def test_deformed_ladder_cubic_phi():
    # phi(z) = z^3 on labels 0..6: X+X- = phi(X0) holds exactly below the edge
    rep = Representation.deformed((1.0, 0.0, 0.0, 0.0), 7)
    lad = build_ladder(rep)
    phi_mat = OperatorMatrix.diagonal(lad.phi(rep.numeric_labels()))
    diff = lad.plus @ lad.minus - phi_mat
    assert interior_norm(diff, lad.interior) <= TOL


def test_build_ladder_rejects_symmetric_multiplet():
    with pytest.raises(ValueError, match="collective_un"):
        build_ladder(Representation.symmetric_un(3, 2))


def test_representation_validation():
    with pytest.raises(ValueError):
        Representation.boson(-1)
    with pytest.raises(ValueError):
        Representation.spin(0)
    with pytest.raises(ValueError):
        Representation.euclid(0)


# -- symmetric u(N) multiplets ---------------------------------------------------


def test_symmetric_dimension_formula():
    for n, a in itertools.product(range(2, 5), range(1, 4)):
        rep = Representation.symmetric_un(n, a)
        assert rep.dim == math.comb(a + n - 1, n - 1)
        assert len(set(rep.labels)) == rep.dim
        assert all(sum(occ) == a for occ in rep.labels)


def test_occupation_vectors_sorted():
    occ = occupation_vectors(3, 2)
    assert occ == sorted(occ)


@pytest.mark.parametrize("n,a", [(n, a) for n in range(2, 5) for a in range(1, 4)])
def test_un_structure_relations_exhaustive(n, a):
    """[S^{ij}, S^{km}] = d_{jk} S^{im} - d_{im} S^{kj} over all index tuples."""
    rep = Representation.symmetric_un(n, a)
    ops = {(i, j): collective_un(rep, i, j).array
           for i in range(1, n + 1) for j in range(1, n + 1)}
    for i, j, k, m in itertools.product(range(1, n + 1), repeat=4):
        lhs = ops[(i, j)] @ ops[(k, m)] - ops[(k, m)] @ ops[(i, j)]
        rhs = np.zeros_like(lhs)
        if j == k:
            rhs = rhs + ops[(i, m)]
        if i == m:
            rhs = rhs - ops[(k, j)]
        assert np.abs(lhs - rhs).max() <= TOL


def test_total_population_is_atom_count():
    for n, a in itertools.product(range(2, 5), range(1, 4)):
        rep = Representation.symmetric_un(n, a)
        total = sum(level_population(rep, j).real_diagonal()
                    for j in range(1, n + 1))
        assert total == pytest.approx(a * np.ones(rep.dim))


def test_pair_commutator_population_difference():
    rep = Representation.symmetric_un(2, 2)
    s12 = collective_un(rep, 1, 2)
    s21 = collective_un(rep, 2, 1)
    expected = collective_un(rep, 1, 1) - collective_un(rep, 2, 2)
    assert commutator(s12, s21).array == pytest.approx(expected.array, abs=TOL)


@pytest.mark.parametrize("atoms", [1, 2, 3])
def test_two_level_multiplet_reduces_to_collective_spin(atoms):
    """The raising generator equals collective S+ after reordering the basis."""
    rep = Representation.symmetric_un(2, atoms)
    raising = atomic_transition(rep, 1, 2).array
    spin = build_ladder(Representation.spin(atoms))
    # occupation (n1, n2) has Sz label (n2 - n1)/2; sort by it
    order = np.argsort([(occ[1] - occ[0]) / 2 for occ in rep.labels])
    perm = raising[np.ix_(order, order)]
    assert perm == pytest.approx(spin.plus.array, abs=TOL)


# -- composite spaces -------------------------------------------------------------


def test_lift_identity_and_dimension():
    space = CompositeSpace([Representation.spin(2), Representation.boson(3)])
    assert space.dim == 3 * 4
    ident = OperatorMatrix.identity(3)
    assert lift(space, 0, ident).array == pytest.approx(np.eye(12))


def test_lifted_factors_commute():
    space = CompositeSpace([Representation.spin(2), Representation.boson(4)])
    sz = build_ladder(space.factors[0]).x0
    a = build_ladder(space.factors[1]).minus
    c = commutator(lift(space, 0, sz), lift(space, 1, a))
    assert c.norm() == pytest.approx(0.0, abs=TOL)


def test_lift_validates_index_and_dim():
    space = CompositeSpace([Representation.spin(1), Representation.boson(2)])
    with pytest.raises(IndexError):
        space.lift(2, OperatorMatrix.identity(2))
    with pytest.raises(ValueError):
        space.lift(0, OperatorMatrix.identity(5))


def test_label_grid_layout():
    space = CompositeSpace([Representation.spin(1), Representation.boson(2)])
    assert space.label_grid(0) == pytest.approx([-0.5, -0.5, -0.5, 0.5, 0.5, 0.5])
    assert space.label_grid(1) == pytest.approx([0.0, 1.0, 2.0, 0.0, 1.0, 2.0])


def test_basis_state_indexing():
    space = CompositeSpace([Representation.spin(1), Representation.boson(3)])
    vec = space.basis_state(1, 2)
    assert vec[space.basis_index(1, 2)] == 1.0
    assert np.linalg.norm(vec) == 1.0


# -- OperatorMatrix contract -------------------------------------------------------


def test_hermitian_tag_validated():
    good = np.array([[1.0, 2.0], [2.0, -1.0]])
    OperatorMatrix(good, hermitian=True)
    with pytest.raises(ValueError, match="hermitian"):
        OperatorMatrix(np.array([[0.0, 1.0], [0.0, 0.0]]), hermitian=True)


def test_dimension_mismatch_raises():
    a = OperatorMatrix.identity(2)
    b = OperatorMatrix.identity(3)
    with pytest.raises(ValueError):
        _ = a + b
    with pytest.raises(ValueError):
        commutator(a, b)


def test_tensor_multiplies_dims():
    a = OperatorMatrix.identity(2)
    b = OperatorMatrix.identity(3)
    assert a.tensor(b).dim == 6


def test_structural_function_iterated_difference():
    phi = StructuralFunction((1.0, 0.0, 0.0))  # z^2
    z = np.arange(5.0)
    assert phi.iterated_difference(0, z) == pytest.approx(z ** 2)
    assert phi.iterated_difference(1, z) == pytest.approx(-(2 * z + 1))
    assert phi.iterated_difference(2, z) == pytest.approx(2 * np.ones(5))
    assert phi.iterated_difference(3, z) == pytest.approx(np.zeros(5), abs=TOL)
    assert phi.degree == 2
