"""Concrete Hamiltonians: coupled-ladder systems, Dicke variants, diamond atoms.

Everything here is assembled from the ladder builders in
:mod:`effres.operators`, so a single generic coupled-ladder routine covers
the number-conserving Dicke model, its counter-rotating extension, and the
time-independent (phase-ladder) form of a classically driven collection of
two-level atoms.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .operators import (
    CompositeSpace,
    Ladder,
    OperatorMatrix,
    Representation,
    build_ladder,
    collective_un,
)
from .resonances import AtomFieldModel, atom_field_space, excitation_number


@dataclass(frozen=True)
class TwoLadderSystem:
    """Two ladder subsystems lifted onto their common product space.

    x is the subsystem whose raising operator appears in the resonant terms
    (for atom-field models: the collective spin), y the partner (field or
    phase ladder).
    """

    space: CompositeSpace
    ladder_x: Ladder
    ladder_y: Ladder
    x0: OperatorMatrix
    xp: OperatorMatrix
    xm: OperatorMatrix
    y0: OperatorMatrix
    yp: OperatorMatrix
    ym: OperatorMatrix

    @property
    def dim(self) -> int:
        return self.space.dim

    def x_labels(self) -> np.ndarray:
        return self.space.label_grid(0)

    def y_labels(self) -> np.ndarray:
        return self.space.label_grid(1)

    def interior(self, margin_x: int = 0, margin_y: int = 1) -> OperatorMatrix:
        return self.space.interior_projector({0: margin_x, 1: margin_y})


def two_ladder_system(rep_x: Representation, rep_y: Representation) -> TwoLadderSystem:
    """Build both ladders and lift them onto CompositeSpace([rep_x, rep_y])."""
    lx = build_ladder(rep_x)
    ly = build_ladder(rep_y)
    space = CompositeSpace([rep_x, rep_y])
    return TwoLadderSystem(
        space=space,
        ladder_x=lx,
        ladder_y=ly,
        x0=space.lift(0, lx.x0),
        xp=space.lift(0, lx.plus),
        xm=space.lift(0, lx.minus),
        y0=space.lift(1, ly.x0),
        yp=space.lift(1, ly.plus),
        ym=space.lift(1, ly.minus),
    )


def coupled_hamiltonian(system: TwoLadderSystem, omega_x: float, omega_y: float,
                        g: float, counter_rotating: bool) -> OperatorMatrix:
    """H = omega_x X0 + omega_y Y0 + g (X+Y- + X-Y+) [+ g (X+Y+ + X-Y-)]."""
    h = (omega_x * system.x0 + omega_y * system.y0
         + g * (system.xp @ system.ym + system.xm @ system.yp))
    if counter_rotating:
        h = h + g * (system.xp @ system.yp + system.xm @ system.ym)
    return h.as_hermitian()


# -- Dicke variants ------------------------------------------------------------


def dicke_system(atoms: int, n_max: int) -> TwoLadderSystem:
    return two_ladder_system(Representation.spin(atoms), Representation.boson(n_max))


def rwa_dicke(omega_field: float, omega_atom: float, g: float, atoms: int,
              n_max: int) -> tuple[OperatorMatrix, TwoLadderSystem]:
    """Number-conserving Dicke Hamiltonian omega a^dag a + omega0 Sz + g(aS+ + h.c.)."""
    system = dicke_system(atoms, n_max)
    return coupled_hamiltonian(system, omega_atom, omega_field, g,
                               counter_rotating=False), system


def nonrwa_dicke(omega_atom: float, omega_field: float, g: float, atoms: int,
                 n_max: int) -> tuple[OperatorMatrix, TwoLadderSystem]:
    """Dicke Hamiltonian with both rotating and counter-rotating couplings."""
    system = dicke_system(atoms, n_max)
    return coupled_hamiltonian(system, omega_atom, omega_field, g,
                               counter_rotating=True), system


def dicke_excitation_number(system: TwoLadderSystem) -> OperatorMatrix:
    """N = Sz + a^dag a, conserved exactly by the number-conserving model."""
    return (system.x0 + system.y0).as_hermitian()


def floquet_dicke(omega_atom: float, drive_freq: float, coupling: float,
                  atoms: int, m_range: int) -> tuple[OperatorMatrix, TwoLadderSystem]:
    """Static phase-ladder form of the classically driven collective spin.

    H = omega Sz + Omega E0 + c (S+ + S-)(E + E^dag) on spin x euclid(m_range).
    Averaging over phase states turns E + E^dag into 2 cos(Omega t), so the
    static coupling c corresponds to a cosine drive of amplitude 2c: pass
    g/2 here to cross-validate :func:`classical_drive` with amplitude g.
    """
    system = two_ladder_system(Representation.spin(atoms),
                               Representation.euclid(m_range))
    return coupled_hamiltonian(system, omega_atom, drive_freq, coupling,
                               counter_rotating=True), system


def classical_drive(omega_atom: float, drive_freq: float, g: float,
                    atoms: int) -> tuple[Callable[[float], np.ndarray], Ladder]:
    """Time-periodic H(t) = omega Sz + g (S+ + S-) cos(Omega t) on the bare spin.

    Returns the callable (producing plain arrays for the propagator loop) and
    the spin ladder for observables.
    """
    ladder = build_ladder(Representation.spin(atoms))
    sz = ladder.x0.array
    sx2 = (ladder.plus + ladder.minus).array

    def h_of_t(t: float) -> np.ndarray:
        return omega_atom * sz + g * np.cos(drive_freq * t) * sx2

    return h_of_t, ladder


# -- multilevel atom-field models ----------------------------------------------


def atom_field_hamiltonian(model: AtomFieldModel,
                           space: CompositeSpace | None = None) -> OperatorMatrix:
    """Number-conserving Hamiltonian of an AtomFieldModel.

    H = omega a^dag a + sum_j E_j S^{jj} + sum_channels g (a S_+^{ij} + h.c.)
    """
    if space is None:
        space = atom_field_space(model)
    atom_rep, field_rep = space.factors
    field_ladder = build_ladder(field_rep)

    diag = np.zeros(atom_rep.dim)
    for j, energy in enumerate(model.energies, start=1):
        diag = diag + energy * collective_un(atom_rep, j, j).real_diagonal()
    h = space.lift(0, OperatorMatrix.diagonal(diag))
    h = h + model.omega * space.lift(1, field_ladder.x0)

    a_low = space.lift(1, field_ladder.minus)
    for ch in model.channels:
        s_up = space.lift(0, collective_un(atom_rep, ch.upper, ch.lower))
        term = a_low @ s_up
        h = h + ch.coupling * (term + term.dag())
    return h.as_hermitian()


def free_hamiltonian(model: AtomFieldModel,
                     space: CompositeSpace | None = None) -> OperatorMatrix:
    """The diagonal part alone: omega a^dag a + sum_j E_j S^{jj}."""
    stripped = AtomFieldModel(
        energies=model.energies, mu=model.mu, channels=(),
        omega=model.omega, n_max=model.n_max, atoms=model.atoms,
    )
    return atom_field_hamiltonian(stripped, space)


__all__ = [
    "TwoLadderSystem",
    "two_ladder_system",
    "coupled_hamiltonian",
    "dicke_system",
    "rwa_dicke",
    "nonrwa_dicke",
    "dicke_excitation_number",
    "floquet_dicke",
    "classical_drive",
    "atom_field_hamiltonian",
    "free_hamiltonian",
    "excitation_number",
]
