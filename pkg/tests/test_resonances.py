"""Kinematic enumeration, classification, and interaction-operator checks."""

import itertools
import math

import numpy as np
import pytest

from effres.resonances import (
    CLASS_COLLECTIVE,
    CLASS_EXPLICIT,
    CLASS_MULTIPHOTON,
    CLASS_PHOTON_ASSISTED,
    CLASS_VIRTUAL,
    AtomFieldModel,
    DipoleChannel,
    ResonanceVector,
    atom_field_space,
    build_interaction_operator,
    classify,
    diamond_model,
    enumerate_conditions,
    enumerate_vectors,
    excitation_number,
    min_atoms,
    resonance_defect,
    solve_resonant_frequency,
    two_level_model,
)

SINGLE_ATOM_VECTORS = [
    (0, 0, 1), (0, 1, -1), (0, 1, 0), (1, -1, 0), (1, 0, -1), (1, 0, 0),
]

TWO_ATOM_EXTRA = [
    (0, 1, -2), (0, 1, 1), (0, 2, -1), (1, -2, 0), (1, -2, 1), (1, -1, -1),
    (1, -1, 1), (1, 0, -2), (1, 0, 1), (1, 1, -2), (1, 1, -1), (1, 1, 0),
    (2, -1, -1), (2, -1, 0), (2, 0, -1),
]


def brute_force_vectors(model):
    """Independent oracle: literal max over all nonempty index-subset sums."""
    n, a = model.n_levels, model.atoms
    found = set()
    for k in itertools.product(range(-a, a + 1), repeat=n - 1):
        if all(v == 0 for v in k):
            continue
        bound = max(abs(sum(k[i] for i in subset))
                    for r in range(1, n)
                    for subset in itertools.combinations(range(n - 1), r))
        if bound > a:
            continue
        nonzero = [abs(v) for v in k if v != 0]
        if math.gcd(*nonzero) != 1:
            continue
        first = next(v for v in k if v != 0)
        if first < 0:
            k = tuple(-v for v in k)
        found.add(k)
    return sorted(found)


def test_single_atom_diamond_golden():
    model = diamond_model(atoms=1)
    assert [v.k for v in enumerate_vectors(model)] == SINGLE_ATOM_VECTORS


def test_two_atom_diamond_golden():
    model = diamond_model(atoms=2)
    vectors = [v.k for v in enumerate_vectors(model)]
    assert len(vectors) == 21
    assert sorted(vectors) == sorted(SINGLE_ATOM_VECTORS + TWO_ATOM_EXTRA)


def test_two_level_single_resonance():
    model = two_level_model()
    vectors = enumerate_vectors(model)
    assert [v.k for v in vectors] == [(1,)]
    klass, atoms_needed = classify(vectors[0], model)
    assert klass == CLASS_EXPLICIT
    assert atoms_needed == 1


@pytest.mark.parametrize("atoms", [1, 2, 3])
@pytest.mark.parametrize("n_levels", [2, 3, 4])
def test_enumeration_matches_brute_force(n_levels, atoms):
    energies = tuple(float(j) + 0.01 * j * j for j in range(n_levels))
    mu = tuple(range(n_levels))
    channels = tuple(DipoleChannel(j, j + 1, 0.01) for j in range(1, n_levels))
    model = AtomFieldModel(energies=energies, mu=mu, channels=channels,
                           omega=1.0, n_max=4, atoms=atoms)
    assert [v.k for v in enumerate_vectors(model)] == brute_force_vectors(model)


def test_vectors_canonical_and_coprime():
    for v in enumerate_vectors(diamond_model(atoms=3)):
        assert v.canonical
        assert v.coprime
        assert min_atoms(v.k) <= 3


# -- resonance condition arithmetic ------------------------------------------------


def test_two_photon_defect_zero():
    model = diamond_model(omega=1.0, energies=(0.0, 0.9, 1.1, 2.0))
    assert resonance_defect(ResonanceVector((1, 0, 0)), model, 1.0) == pytest.approx(0.0)


def test_photon_assisted_defect_frequency_independent():
    model = diamond_model(energies=(0.0, 0.9, 1.1, 2.0))
    v = ResonanceVector((0, 1, -1))
    for omega in (0.3, 1.0, 2.7):
        assert resonance_defect(v, model, omega) == pytest.approx(1.1 - 0.9)
    omega_star, defect = solve_resonant_frequency(v, model)
    assert omega_star is None
    assert defect == pytest.approx(0.2)


def test_defect_vanishes_at_own_omega_star():
    model = diamond_model(atoms=2)
    for v in enumerate_vectors(model):
        omega_star, _ = solve_resonant_frequency(v, model)
        if omega_star is not None:
            assert resonance_defect(v, model, omega_star) == pytest.approx(0.0, abs=1e-12)


def test_diamond_omega_star_values():
    model = diamond_model(energies=(0.0, 0.9, 1.1, 2.0))
    values = {
        (1, 0, 0): (2.0 - 0.0) / 2,   # two photons bridge the full gap
        (0, 1, 0): 2.0 - 0.9,
        (0, 0, 1): 2.0 - 1.1,
        (1, -1, 0): 0.9,
        (1, 0, -1): 1.1,
    }
    for k, expected in values.items():
        omega_star, _ = solve_resonant_frequency(ResonanceVector(k), model)
        assert omega_star == pytest.approx(expected)


def test_negative_omega_star_flagged_unphysical():
    # (0, 1, -2) emits one net photon while climbing: omega* = (2E3 - E2 - E4)/(-1)
    model = diamond_model(atoms=2, energies=(0.0, 0.9, 1.9, 2.0))
    by_vec = {c.vector.k: c for c in enumerate_conditions(model)}
    cond = by_vec[(0, 1, -2)]
    assert cond.omega_star == pytest.approx(-0.9)
    assert cond.unphysical


# -- classification -----------------------------------------------------------------


def test_single_atom_classes():
    model = diamond_model(atoms=1)
    expected = {
        (1, 0, 0): CLASS_MULTIPHOTON,
        (0, 1, 0): CLASS_EXPLICIT,
        (0, 0, 1): CLASS_EXPLICIT,
        (1, -1, 0): CLASS_EXPLICIT,
        (1, 0, -1): CLASS_EXPLICIT,
        (0, 1, -1): CLASS_PHOTON_ASSISTED,
    }
    for k, klass in expected.items():
        got, atoms_needed = classify(ResonanceVector(k), model)
        assert got == klass, k
        assert atoms_needed == 1


def test_two_atom_class_census():
    model = diamond_model(atoms=2)
    census = {}
    for c in enumerate_conditions(model):
        census[c.klass] = census.get(c.klass, 0) + 1
    assert census == {
        CLASS_EXPLICIT: 4,
        CLASS_MULTIPHOTON: 1,
        CLASS_PHOTON_ASSISTED: 1,
        CLASS_VIRTUAL: 3,
        CLASS_COLLECTIVE: 12,
    }


def test_virtual_photon_vectors_need_two_atoms():
    model = diamond_model(atoms=2)
    for c in enumerate_conditions(model):
        if c.klass == CLASS_VIRTUAL:
            assert c.min_atoms == 2
            assert c.photon_exponent == 0


def test_class_invariant_under_energy_shift():
    base = diamond_model(atoms=2)
    shifted = diamond_model(atoms=2,
                            energies=tuple(e + 0.37 for e in base.energies))
    for v in enumerate_vectors(base):
        if sum(v.k[j] * (base.mu[-1] - base.mu[j]) for j in range(3)) == 0:
            assert classify(v, base)[0] == classify(v, shifted)[0]


def test_classify_total_and_deterministic():
    model = diamond_model(atoms=3)
    for v in enumerate_vectors(model):
        first = classify(v, model)
        assert first == classify(v, model)
        assert first[0] in {CLASS_EXPLICIT, CLASS_MULTIPHOTON, CLASS_COLLECTIVE,
                            CLASS_VIRTUAL, CLASS_PHOTON_ASSISTED}


# -- interaction operators ------------------------------------------------------------


def test_two_photon_operator_nonzero_and_conserving():
    model = diamond_model(atoms=1, n_max=5)
    space = atom_field_space(model)
    op = build_interaction_operator(ResonanceVector((1, 0, 0)), model, space)
    assert op.norm() > 0.0
    n_op = excitation_number(model, space)
    comm = n_op.array @ op.array - op.array @ n_op.array
    assert np.abs(comm).max() <= 1e-10


def test_every_condition_conserves_excitation_number():
    model = diamond_model(atoms=2, n_max=4)
    space = atom_field_space(model)
    n_op = excitation_number(model, space)
    for v in enumerate_vectors(model):
        op = build_interaction_operator(v, model, space)
        comm = n_op.array @ op.array - op.array @ n_op.array
        assert np.abs(comm).max() <= 1e-10, v.k


def test_photon_assisted_operator_survives_single_atom():
    model = diamond_model(atoms=1, n_max=3)
    op = build_interaction_operator(ResonanceVector((0, 1, -1)), model)
    assert op.norm() > 0.0


def test_insufficient_atoms_yield_zero_operator():
    model = diamond_model(atoms=1, n_max=3)
    with pytest.warns(UserWarning, match="at least 2 atoms"):
        op = build_interaction_operator(ResonanceVector((1, 1, 0)), model)
    assert op.norm() == 0.0


# -- model validation -----------------------------------------------------------------


def test_energies_must_increase():
    with pytest.raises(ValueError, match="strictly increasing"):
        AtomFieldModel(energies=(0.0, 1.0, 1.0), mu=(0, 1, 1), channels=(),
                       omega=1.0, n_max=2, atoms=1)


def test_channel_weight_consistency_checked():
    with pytest.raises(ValueError, match="conservation"):
        AtomFieldModel(energies=(0.0, 1.0, 2.0), mu=(0, 1, 1),
                       channels=(DipoleChannel(2, 3, 0.1),),
                       omega=1.0, n_max=2, atoms=1)


def test_mu_integers_required():
    with pytest.raises(ValueError, match="integer"):
        AtomFieldModel(energies=(0.0, 1.0), mu=(0.0, 0.5), channels=(),
                       omega=1.0, n_max=2, atoms=1)
