"""Kinematic resonance enumeration for number-conserving atom-field models.

An interaction term of a single-mode model with N atomic levels is labeled by
an integer vector k = (k_1..k_{N-1}): k_j counts net transfers from level j
into the top level, and conservation of the excitation number
N_op = a^dag a + sum_j mu_j S^{jj} fixes the photon exponent
k_N = sum_j k_j (mu_N - mu_j).  The term is resonant when

    sum_j k_j (E_N - E_j - omega (mu_N - mu_j)) = 0.

Because at most `atoms` atoms can be raised into or lowered out of the top
level, only finitely many vectors are admissible, and each one can be
classified from its net level-transfer signature alone.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .operators import (
    CompositeSpace,
    OperatorMatrix,
    Representation,
    atomic_transition,
    build_ladder,
    collective_un,
)

CLASS_EXPLICIT = "explicit"
CLASS_MULTIPHOTON = "multiphoton"
CLASS_COLLECTIVE = "collective-multiphoton"
CLASS_VIRTUAL = "virtual-photon"
CLASS_PHOTON_ASSISTED = "photon-assisted"


@dataclass(frozen=True)
class DipoleChannel:
    """One-photon dipole channel lower -> upper with coupling g >= 0."""

    lower: int
    upper: int
    coupling: float


@dataclass(frozen=True)
class AtomFieldModel:
    """A collection of identical multilevel atoms coupled to one field mode.

    Parameters
    ----------
    energies : tuple of float
        Level energies E_1 < ... < E_N in angular-frequency units (hbar = 1).
    mu : tuple of int
        Excitation weights of the levels; every declared channel i -> j must
        satisfy mu_j - mu_i = 1 so that a S_+^{ij} conserves the excitation
        number.
    channels : tuple of DipoleChannel
        Dipole channels explicitly present in the Hamiltonian.
    omega : float
        Field frequency (>= 0).
    n_max : int
        Fock-space truncation.
    atoms : int
        Number of identical atoms (>= 1).
    """

    energies: tuple[float, ...]
    mu: tuple[int, ...]
    channels: tuple[DipoleChannel, ...]
    omega: float
    n_max: int
    atoms: int

    def __post_init__(self):
        n = len(self.energies)
        if n < 2:
            raise ValueError("need at least two atomic levels")
        if len(self.mu) != n:
            raise ValueError("mu must have one weight per level")
        if any(e2 <= e1 for e1, e2 in zip(self.energies, self.energies[1:])):
            raise ValueError("energies must be strictly increasing")
        if any(int(m) != m for m in self.mu):
            raise ValueError("excitation weights mu must be integers")
        if self.atoms < 1:
            raise ValueError("atom count must be >= 1")
        if self.n_max < 0:
            raise ValueError("n_max must be >= 0")
        if self.omega < 0:
            raise ValueError("field frequency must be >= 0")
        for ch in self.channels:
            if not (1 <= ch.lower < ch.upper <= n):
                raise ValueError(f"invalid channel {ch.lower}->{ch.upper}")
            if ch.coupling < 0:
                raise ValueError("channel couplings must be >= 0")
            if self.mu[ch.upper - 1] - self.mu[ch.lower - 1] != 1:
                raise ValueError(
                    f"channel {ch.lower}->{ch.upper} breaks excitation "
                    f"conservation: mu_upper - mu_lower != 1"
                )

    @property
    def n_levels(self) -> int:
        return len(self.energies)

    def channel_pairs(self) -> set[tuple[int, int]]:
        return {(ch.lower, ch.upper) for ch in self.channels}


@dataclass(frozen=True)
class ResonanceVector:
    """Canonical coprime label of one resonance (k and -k are identified)."""

    k: tuple[int, ...]

    def __post_init__(self):
        if all(v == 0 for v in self.k):
            raise ValueError("resonance vector must be nonzero")

    @property
    def canonical(self) -> bool:
        first = next(v for v in self.k if v != 0)
        return first > 0

    @property
    def coprime(self) -> bool:
        return math.gcd(*(abs(v) for v in self.k)) == 1

    def flipped(self) -> "ResonanceVector":
        return ResonanceVector(tuple(-v for v in self.k))


@dataclass(frozen=True)
class ResonanceCondition:
    """A classified resonance: vector, photon exponent, location, taxonomy."""

    vector: ResonanceVector
    photon_exponent: int
    omega_star: float | None
    energy_defect: float | None
    klass: str
    min_atoms: int
    unphysical: bool = False

    @property
    def frequency_independent(self) -> bool:
        return self.omega_star is None


def photon_exponent(k: tuple[int, ...], model: AtomFieldModel) -> int:
    mu = model.mu
    mu_n = mu[-1]
    return int(sum(kj * (mu_n - mu[j]) for j, kj in enumerate(k)))


def min_atoms(k: tuple[int, ...]) -> int:
    """Smallest atom number that can realize the transfer pattern k.

    At most A atoms can be raised into, or lowered out of, the top level, so
    the bound is max(sum of positive k_j, sum of |negative k_j|); that value
    also equals the largest |partial sum| of k over any index subset.
    """
    pos = sum(v for v in k if v > 0)
    neg = sum(-v for v in k if v < 0)
    return max(pos, neg)


def enumerate_vectors(model: AtomFieldModel) -> list[ResonanceVector]:
    """All admissible resonance vectors of the model, lexicographically sorted.

    A vector is admissible when it is nonzero, its nonzero entries are
    coprime, the atom bound ``min_atoms(k) <= model.atoms`` holds, and it is
    canonical (first nonzero entry positive; k and -k label one resonance,
    being an interaction and its Hermitian conjugate).
    """
    n = model.n_levels
    a = model.atoms
    out = []
    for k in itertools.product(range(-a, a + 1), repeat=n - 1):
        if all(v == 0 for v in k):
            continue
        if min_atoms(k) > a:
            continue
        vec = ResonanceVector(k)
        if not vec.canonical or not vec.coprime:
            continue
        out.append(vec)
    out.sort(key=lambda v: v.k)
    return out


def resonance_defect(vector: ResonanceVector, model: AtomFieldModel,
                     omega: float) -> float:
    """sum_j k_j (E_N - E_j - omega (mu_N - mu_j)); zero exactly on resonance."""
    e = model.energies
    mu = model.mu
    e_n, mu_n = e[-1], mu[-1]
    return float(sum(kj * (e_n - e[j] - omega * (mu_n - mu[j]))
                     for j, kj in enumerate(vector.k)))


def solve_resonant_frequency(vector: ResonanceVector,
                             model: AtomFieldModel) -> tuple[float | None, float]:
    """Resonant field frequency of a vector, or its frequency-independent defect.

    Returns ``(omega_star, energy_sum)`` where ``energy_sum`` is
    sum_j k_j (E_N - E_j).  When the photon exponent vanishes the condition
    does not involve omega and ``omega_star`` is None; the residual defect is
    then ``energy_sum`` itself.
    """
    e = model.energies
    e_n = e[-1]
    energy_sum = float(sum(kj * (e_n - e[j]) for j, kj in enumerate(vector.k)))
    k_n = photon_exponent(vector.k, model)
    if k_n == 0:
        return None, energy_sum
    return energy_sum / k_n, energy_sum


def net_level_transfer(k: tuple[int, ...]) -> tuple[int, ...]:
    """Net atom-count change per level produced by the interaction labeled k."""
    return tuple(-v for v in k) + (sum(k),)


def classify(vector: ResonanceVector, model: AtomFieldModel) -> tuple[str, int]:
    """Taxonomy class and minimum atom number of a resonance vector.

    The class is read off the net level-transfer signature: a single
    one-atom transfer that matches a declared channel is explicit; a single
    transfer with photons exchanged is a multiphoton transition; a single
    transfer with zero net photons is photon-assisted; balanced multi-level
    transfers are virtual-photon (zero net photons, needing >= 2 atoms) or
    collective-multiphoton otherwise.
    """
    k = vector.k
    delta = net_level_transfer(k)
    k_n = photon_exponent(k, model)
    sources = [j for j, d in enumerate(delta) if d < 0]
    sinks = [j for j, d in enumerate(delta) if d > 0]
    single = (len(sources) == 1 and len(sinks) == 1
              and delta[sources[0]] == -1 and delta[sinks[0]] == 1)
    if single:
        pair = (sources[0] + 1, sinks[0] + 1)
        if pair in model.channel_pairs():
            return CLASS_EXPLICIT, min_atoms(k)
        if k_n == 0:
            return CLASS_PHOTON_ASSISTED, min_atoms(k)
        return CLASS_MULTIPHOTON, min_atoms(k)
    if k_n == 0:
        return CLASS_VIRTUAL, min_atoms(k)
    return CLASS_COLLECTIVE, min_atoms(k)


def condition_for(vector: ResonanceVector,
                  model: AtomFieldModel) -> ResonanceCondition:
    omega_star, energy_sum = solve_resonant_frequency(vector, model)
    klass, atoms_needed = classify(vector, model)
    if omega_star is None:
        return ResonanceCondition(vector, 0, None, energy_sum, klass, atoms_needed)
    k_n = photon_exponent(vector.k, model)
    return ResonanceCondition(vector, k_n, omega_star, None, klass,
                              atoms_needed, unphysical=omega_star < 0)


def enumerate_conditions(model: AtomFieldModel) -> list[ResonanceCondition]:
    """The full classified resonance table, deterministically ordered."""
    return [condition_for(v, model) for v in enumerate_vectors(model)]


def atom_field_space(model: AtomFieldModel) -> CompositeSpace:
    """Composite space (symmetric atomic multiplet) x (truncated Fock space)."""
    return CompositeSpace([
        Representation.symmetric_un(model.n_levels, model.atoms),
        Representation.boson(model.n_max),
    ])


def build_interaction_operator(vector: ResonanceVector, model: AtomFieldModel,
                               space: CompositeSpace | None = None) -> OperatorMatrix:
    """Matrix of the interaction prod_j (S_+^{jN})^{k_j} a^{k_N}.

    Negative exponents stand for Hermitian conjugate factors.  Lowering
    factors are applied after raising ones, so transfer chains that pass
    through the top level survive on few-atom spaces.  The result commutes
    with the excitation number exactly; if the model holds fewer atoms than
    ``min_atoms(vector.k)`` the product annihilates the symmetric space and
    a zero matrix is returned (with a warning).
    """
    if space is None:
        space = atom_field_space(model)
    atom_rep = space.factors[0]
    n = model.n_levels
    k = vector.k

    raising = np.eye(atom_rep.dim, dtype=complex)
    lowering = np.eye(atom_rep.dim, dtype=complex)
    for j, kj in enumerate(k, start=1):
        if kj > 0:
            step = atomic_transition(atom_rep, j, n).array
            raising = np.linalg.matrix_power(step, kj) @ raising
        elif kj < 0:
            step = atomic_transition(atom_rep, j, n).array.conj().T
            lowering = np.linalg.matrix_power(step, -kj) @ lowering
    atom_op = OperatorMatrix(lowering @ raising)

    field_rep = space.factors[1]
    k_n = photon_exponent(k, model)
    field_ladder = build_ladder(field_rep)
    if k_n >= 0:
        field_op = field_ladder.minus.power(k_n)
    else:
        field_op = field_ladder.plus.power(-k_n)

    op = space.lift(0, atom_op) @ space.lift(1, field_op)
    if op.norm() == 0.0 and min_atoms(k) > model.atoms:
        warnings.warn(
            f"interaction {k} needs at least {min_atoms(k)} atoms; the "
            f"product annihilates the {model.atoms}-atom symmetric space",
            stacklevel=2,
        )
    return op


def excitation_number(model: AtomFieldModel,
                      space: CompositeSpace | None = None) -> OperatorMatrix:
    """N_op = a^dag a + sum_j mu_j S^{jj} on the composite space."""
    if space is None:
        space = atom_field_space(model)
    atom_rep, field_rep = space.factors
    diag = np.zeros(atom_rep.dim)
    for j, weight in enumerate(model.mu, start=1):
        diag = diag + weight * collective_un(atom_rep, j, j).real_diagonal()
    n_atoms = OperatorMatrix.diagonal(diag)
    n_field = OperatorMatrix.diagonal(np.arange(field_rep.dim, dtype=float))
    return space.lift(0, n_atoms) + space.lift(1, n_field)


# -- ready-made models --------------------------------------------------------

def diamond_model(omega: float = 1.0,
                  energies: tuple[float, float, float, float] = (0.0, 0.9, 1.1, 2.0),
                  couplings: tuple[float, float, float, float] = (0.002, 0.0024, 0.0022, 0.0018),
                  atoms: int = 1,
                  n_max: int = 6) -> AtomFieldModel:
    """Four-level diamond: channels 1-2, 1-3, 2-4, 3-4, weights (-1, 0, 0, 1)."""
    g1, g2, g3, g4 = couplings
    return AtomFieldModel(
        energies=tuple(float(e) for e in energies),
        mu=(-1, 0, 0, 1),
        channels=(
            DipoleChannel(1, 2, g1),
            DipoleChannel(1, 3, g2),
            DipoleChannel(2, 4, g3),
            DipoleChannel(3, 4, g4),
        ),
        omega=float(omega),
        n_max=n_max,
        atoms=atoms,
    )


def two_level_model(omega: float = 1.0, splitting: float = 1.0,
                    coupling: float = 0.05, atoms: int = 1,
                    n_max: int = 8) -> AtomFieldModel:
    """Two-level atoms with the single channel 1-2 and weights (0, 1)."""
    return AtomFieldModel(
        energies=(0.0, float(splitting)),
        mu=(0, 1),
        channels=(DipoleChannel(1, 2, float(coupling)),),
        omega=float(omega),
        n_max=n_max,
        atoms=atoms,
    )
