"""Small-rotation (adiabatic elimination) machinery and closed-form effective models.

The generic tool is a Lie-type transformation exp[eps (G - G^dag)] applied in
a truncated adjoint series.  Eliminating the counter-rotating coupling of two
ladder subsystems produces a diagonal shift (dynamic Stark / Bloch-Siegert
part) plus an infinite family of resonant terms X_+^k Y_-^{2l+k} whose
coupling profiles theta_kl are fixed by the structural functions of the two
algebras; both are assembled here in closed form, together with the
first-order effective model of the four-level diamond configuration and the
dispersive limit of the number-conserving Dicke model.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .models import TwoLadderSystem, atom_field_hamiltonian, free_hamiltonian
from .operators import (
    CompositeSpace,
    OperatorMatrix,
    StructuralFunction,
    build_ladder,
    collective_un,
    commutator,
)
from .resonances import AtomFieldModel, atom_field_space

EPSILON_WARN = 0.05
EPSILON_ERROR = 0.2
ANTIHERM_TOL = 1e-12
THETA_DROP_TOL = 1e-12


class ResonantRegimeError(RuntimeError):
    """An elimination denominator is (near) singular: the term is resonant."""


@dataclass(frozen=True)
class RotationGenerator:
    """Anti-Hermitian generator T with small parameter eps: U = exp(eps T)."""

    t: OperatorMatrix
    epsilon: float

    def __post_init__(self):
        defect = np.abs(self.t.array + self.t.array.conj().T).max()
        scale = max(self.t.norm(), 1.0)
        if defect > ANTIHERM_TOL * scale:
            raise ValueError(
                f"generator is not anti-Hermitian: max|T + T^dag| = {defect:.3e}"
            )
        check_small_parameter(self.epsilon, "rotation parameter")


def check_small_parameter(value: float, name: str) -> None:
    """Enforce the perturbative regime: warn above 0.05, refuse above 0.2."""
    mag = abs(value)
    if mag > EPSILON_ERROR:
        raise ValueError(f"{name} = {value:.4g} exceeds the perturbative bound 0.2")
    if mag > EPSILON_WARN:
        warnings.warn(f"{name} = {value:.4g} is large for a small rotation "
                      f"(> {EPSILON_WARN})", stacklevel=3)


def bch_transform(h: OperatorMatrix, gen: RotationGenerator, order: int = 4,
                  exact: bool = False) -> OperatorMatrix:
    """Conjugate H by exp(eps T) via the adjoint series.

    Truncated mode sums eps^j/j! ad_T^j(H) up to ``order``; exact mode uses
    the matrix exponential and is the reference for residual checks.
    """
    if h.dim != gen.t.dim:
        raise ValueError("generator and Hamiltonian dimensions differ")
    if exact:
        u = expm(gen.epsilon * gen.t.array)
        return OperatorMatrix(u @ h.array @ u.conj().T)
    if order < 1:
        raise ValueError("series order must be >= 1")
    out = h.array.copy()
    nested = h.array
    t = gen.t.array
    for j in range(1, order + 1):
        nested = t @ nested - nested @ t
        out = out + (gen.epsilon ** j / math.factorial(j)) * nested
    return OperatorMatrix(out)


def sector_component(h: OperatorMatrix, system: TwoLadderSystem,
                     n: int, m: int) -> OperatorMatrix:
    """Restrict H to entries that raise X0 by n and Y0 by m (label differences)."""
    x = system.x_labels()
    y = system.y_labels()
    keep = (np.isclose(x[:, None] - x[None, :], n)
            & np.isclose(y[:, None] - y[None, :], m))
    return OperatorMatrix(np.where(keep, h.array, 0.0))


def eliminate_term(h: OperatorMatrix, system: TwoLadderSystem, n: int, m: int,
                   coeff: float, omega_x: float, omega_y: float,
                   order: int = 4) -> tuple[OperatorMatrix, RotationGenerator]:
    """Strip one off-resonant coupling coeff (X_+^n Y_+^m + h.c.) from H.

    ``m`` is signed: positive exponents pair with Y_+, negative with Y_-, so
    the rotating-frame frequency of the target is n*omega_x + m*omega_y.  A
    near-singular denominator (|denom| < 10 |coeff|) means the term is
    resonant and must stay; this raises :class:`ResonantRegimeError`.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    denom = n * omega_x + m * omega_y
    if coeff == 0.0:
        gen = RotationGenerator(OperatorMatrix.zeros(h.dim), 0.0)
        return h, gen
    if abs(denom) < 10.0 * abs(coeff):
        raise ResonantRegimeError(
            f"resonant term, cannot eliminate: (n={n}, m={m}) has frequency "
            f"{denom:.4g} versus coupling {coeff:.4g}"
        )
    y_part = system.yp.power(m) if m >= 0 else system.ym.power(-m)
    g_op = system.xp.power(n) @ y_part
    gen = RotationGenerator(g_op - g_op.dag(), coeff / denom)
    return bch_transform(h, gen, order=order), gen


# -- series coefficients --------------------------------------------------------


def series_prefactor(k: int, l: int, g, delta, epsilon):
    """Scalar weight g (-delta)^(l+k-1) eps^(l+2(k-1)) / ((k-1)! (l+k-1)!).

    Works with floats or exact rational types (fractions.Fraction).
    """
    if k < 1 or l < 0:
        raise ValueError("need k >= 1, l >= 0")
    return (g * (-delta) ** (l + k - 1) * epsilon ** (l + 2 * (k - 1))
            / (math.factorial(k - 1) * math.factorial(l + k - 1)))


def theta_table(k: int, l: int, phi1: StructuralFunction, phi2: StructuralFunction,
                x_labels: np.ndarray, y_labels: np.ndarray) -> np.ndarray:
    """Coupling profile theta_kl evaluated on the (x, y) label grid.

    theta_10 is identically one.  For the rest,

        theta_kl(x, y) = sum_j C(J, j) P1(x+k)^(J-j) (-P1(x))^j R_k(x, y - 2j),
        J = l + floor(k/2),

    with the kernel

        R_k(x, y) = sum_j C(Jr, j) P1(x+k)^(Jr-j) (-P1(x))^j
                    * Delta^(k-1) phi2(y - 2j) * prod_{i=1-2j}^{k-2(j+1)} phi2(y + i),
        Jr = floor((k-1)/2),

    where P1 = phi1(z) - phi1(z+1), Delta^m is the m-fold forward difference
    (Delta^0 f = f) and an empty product counts as one.  R_k vanishes whenever
    k - 1 exceeds the degree of phi2, which is what switches whole resonance
    families off for low-degree structural functions.
    """
    if k < 1 or l < 0:
        raise ValueError("need k >= 1, l >= 0")
    x = np.asarray(x_labels, dtype=float)
    y = np.asarray(y_labels, dtype=float)
    xx, yy = np.meshgrid(x, y, indexing="ij")
    if k == 1 and l == 0:
        return np.ones_like(xx)

    p1_shift = phi1.difference(xx + k)
    p1_here = phi1.difference(xx)

    def kernel(y_grid: np.ndarray) -> np.ndarray:
        jr_top = (k - 1) // 2
        total = np.zeros_like(y_grid)
        for jr in range(jr_top + 1):
            # the zeroth-order difference counts as 1 in this expansion
            nab = (phi2.iterated_difference(k - 1, y_grid - 2 * jr)
                   if k > 1 else np.ones_like(y_grid))
            prod = np.ones_like(y_grid)
            for i in range(1 - 2 * jr, k - 2 * (jr + 1) + 1):
                prod = prod * phi2(y_grid + i)
            total = total + (math.comb(jr_top, jr)
                             * p1_shift ** (jr_top - jr)
                             * (-p1_here) ** jr
                             * nab * prod)
        return total

    j_top = l + k // 2
    theta = np.zeros_like(xx)
    for j in range(j_top + 1):
        theta = theta + (math.comb(j_top, j)
                         * p1_shift ** (j_top - j)
                         * (-p1_here) ** j
                         * kernel(yy - 2 * j))
    return theta


def theta_coefficient(k: int, l: int, system: TwoLadderSystem) -> OperatorMatrix:
    """theta_kl as a diagonal operator on the composite space of ``system``."""
    table = theta_table(k, l, system.ladder_x.phi, system.ladder_y.phi,
                        system.ladder_x.rep.numeric_labels(),
                        system.ladder_y.rep.numeric_labels())
    return OperatorMatrix.diagonal(table.reshape(-1))


# -- effective series ------------------------------------------------------------


@dataclass(frozen=True)
class SeriesTerm:
    """One resonant family member: prefactor * (theta X_+^k Y_-^(2l+k) + h.c.)."""

    k: int
    l: int
    prefactor: float
    theta: OperatorMatrix
    operator: OperatorMatrix

    @property
    def photon_order(self) -> int:
        return 2 * self.l + self.k

    @property
    def resonance_ratio(self) -> float:
        """Position of the resonance as omega_x/omega_y = (2l + k)/k."""
        return (2 * self.l + self.k) / self.k

    def frame_frequency(self, omega_x: float, omega_y: float) -> float:
        """Rotating-frame frequency k*omega_x - (2l+k)*omega_y of the term."""
        return self.k * omega_x - (2 * self.l + self.k) * omega_y


@dataclass(frozen=True)
class EffectiveSeries:
    """Diagonal (free + Stark) part plus the surviving resonant terms."""

    omega_x: float
    omega_y: float
    g: float
    epsilon: float
    delta: float
    system: TwoLadderSystem
    diagonal: OperatorMatrix
    terms: tuple[SeriesTerm, ...]

    def hamiltonian(self) -> OperatorMatrix:
        h = self.diagonal
        for term in self.terms:
            h = h + term.operator
        return h.as_hermitian()

    def term(self, k: int, l: int) -> SeriesTerm | None:
        for t in self.terms:
            if t.k == k and t.l == l:
                return t
        return None

    def to_dict(self, samples: int = 8) -> dict:
        diag = self.diagonal.real_diagonal()
        return {
            "parameters": {
                "omega_x": self.omega_x,
                "omega_y": self.omega_y,
                "g": self.g,
                "epsilon": self.epsilon,
                "delta": self.delta,
                "x_dim": self.system.ladder_x.rep.dim,
                "y_dim": self.system.ladder_y.rep.dim,
            },
            "diagonal_samples": [float(v) for v in diag[:samples]],
            "terms": [
                {
                    "k": t.k,
                    "l": t.l,
                    "photon_order": t.photon_order,
                    "resonance_ratio": t.resonance_ratio,
                    "prefactor": float(t.prefactor),
                    "theta_samples": [float(v) for v in
                                      t.theta.real_diagonal()[:samples]],
                    "theta_norm": t.theta.norm(),
                }
                for t in self.terms
            ],
        }


def primitive_pair(k: int, l: int) -> bool:
    """True when (k, l) labels a genuinely new resonance position.

    Non-coprime pairs repeat a lower resonance at higher order (their
    operator signature (k, 2l+k) is an integer multiple of a smaller valid
    one); for l = 0 only the principal pair (1, 0) remains.
    """
    if l == 0:
        return k == 1
    return math.gcd(k, l) == 1


def stark_diagonal(system: TwoLadderSystem) -> OperatorMatrix:
    """Leading Bloch-Siegert profile phi1(x)phi2(y) - phi1(x+1)phi2(y+1)."""
    phi1 = system.ladder_x.phi
    phi2 = system.ladder_y.phi
    x = system.x_labels()
    y = system.y_labels()
    values = phi1(x) * phi2(y) - phi1(x + 1) * phi2(y + 1)
    return OperatorMatrix.diagonal(values)


def nonrwa_series(system: TwoLadderSystem, omega_x: float, omega_y: float,
                  g: float, l_max: int) -> EffectiveSeries:
    """Effective Hamiltonian of the counter-rotating two-ladder model.

    Parameters
    ----------
    system : TwoLadderSystem
        The two coupled ladders; x carries the faster frequency.
    omega_x, omega_y : float
        Free frequencies; requires omega_x >= omega_y, otherwise every higher
        resonance is strongly suppressed and the expansion is refused.
    g : float
        Coupling of g (X+ + X-)(Y+ + Y-).
    l_max : int
        Largest l retained in the resonant families.

    Returns
    -------
    EffectiveSeries
        diagonal = omega_x X0 + omega_y Y0 + g eps (phi1 phi2 - shifted) and
        one term per primitive (k, l) with nonvanishing theta and
        2l + k within the Y truncation, each carrying the scalar
        g (-delta)^(l+k-1) eps^(l+2(k-1)) / ((k-1)!(l+k-1)!).
    """
    if omega_y <= 0 or omega_x <= 0:
        raise ValueError("frequencies must be positive")
    if omega_x < omega_y:
        raise ResonantRegimeError(
            "higher resonances suppressed: the expansion needs "
            f"omega_x >= omega_y (got {omega_x:.4g} < {omega_y:.4g})"
        )
    epsilon = g / (omega_x + omega_y)
    delta = g / (2.0 * omega_y)
    if g != 0.0:
        check_small_parameter(epsilon, "epsilon = g/(omega_x + omega_y)")
        check_small_parameter(delta, "delta = g/(2 omega_y)")

    diagonal = (omega_x * system.x0 + omega_y * system.y0
                + (g * epsilon) * stark_diagonal(system)).as_hermitian()
    if g == 0.0:
        return EffectiveSeries(omega_x, omega_y, g, epsilon, delta, system,
                               diagonal, ())

    k_max = system.ladder_y.phi.degree + 1
    y_dim = system.ladder_y.rep.dim
    terms = []
    for l in range(l_max + 1):
        for k in range(1, k_max + 1):
            if not primitive_pair(k, l):
                continue
            q = 2 * l + k
            if q > y_dim - 1:
                continue
            theta = theta_coefficient(k, l, system)
            scale = max(np.abs(theta.array.diagonal()).max(), 0.0)
            if scale <= THETA_DROP_TOL:
                continue
            pref = float(series_prefactor(k, l, g, delta, epsilon))
            w = theta @ system.xp.power(k) @ system.ym.power(q)
            terms.append(SeriesTerm(k=k, l=l, prefactor=pref, theta=theta,
                                    operator=(pref * (w + w.dag())).as_hermitian()))
    terms.sort(key=lambda t: (t.l, t.k))
    return EffectiveSeries(omega_x, omega_y, g, epsilon, delta, system,
                           diagonal, tuple(terms))


# -- closed forms -----------------------------------------------------------------


def dicke_dispersive(system: TwoLadderSystem, detuning: float,
                     g: float) -> OperatorMatrix:
    """Dispersive (far off-resonant) interaction Hamiltonian of the Dicke model.

    Returns Delta Sz + (g^2/Delta) [(2 a^dag a + 1) Sz - Sz^2 + S(S+1)] on the
    spin x boson space.  The additive S(S+1) piece is a c-number on the
    collective multiplet; keeping it makes the eigenvalues match the exact
    ones level by level instead of up to a common offset.
    """
    if detuning == 0.0:
        raise ValueError("dispersive form requires a nonzero detuning")
    atoms = system.ladder_x.rep.atoms
    n_max = system.ladder_y.rep.n_max
    if atoms is None or n_max is None:
        raise ValueError("dicke_dispersive expects a spin x boson system")
    if abs(detuning) < 10.0 * abs(g) * math.sqrt(n_max + 1):
        warnings.warn(
            f"detuning {detuning:.4g} is not large versus g sqrt(n) = "
            f"{abs(g) * math.sqrt(n_max + 1):.4g}; the dispersive form "
            "degrades near resonance",
            stacklevel=2,
        )
    s = atoms / 2.0
    sz = system.x0
    n_ph = system.y0
    ident = OperatorMatrix.identity(system.dim)
    shift = ((2.0 * n_ph + ident) @ sz - sz @ sz + (s * (s + 1)) * ident)
    return (detuning * sz + (g * g / detuning) * shift).as_hermitian()


DIAMOND_CHANNELS = ((1, 2), (1, 3), (2, 4), (3, 4))


def _diamond_couplings(model: AtomFieldModel) -> tuple[float, float, float, float]:
    pairs = {(ch.lower, ch.upper): ch.coupling for ch in model.channels}
    if model.n_levels != 4 or set(pairs) != set(DIAMOND_CHANNELS):
        raise ValueError("expected a four-level diamond model with channels "
                         "1-2, 1-3, 2-4, 3-4")
    return tuple(pairs[p] for p in DIAMOND_CHANNELS)


def diamond_denominators(model: AtomFieldModel) -> tuple[float, float, float, float]:
    """The four elimination denominators E2-E1-w, E3-E1-w, E4-E2-w, E4-E3-w."""
    e1, e2, e3, e4 = model.energies
    w = model.omega
    return (e2 - e1 - w, e3 - e1 - w, e4 - e2 - w, e4 - e3 - w)


def diamond_small_parameters(model: AtomFieldModel) -> tuple[float, float, float, float]:
    gs = _diamond_couplings(model)
    denoms = diamond_denominators(model)
    for g, d, (lo, hi) in zip(gs, denoms, DIAMOND_CHANNELS):
        if abs(d) < 10.0 * abs(g):
            raise ResonantRegimeError(
                f"channel {lo}->{hi} is (near) resonant: denominator "
                f"{d:.4g} versus coupling {g:.4g}; the off-resonant "
                "expansion does not apply"
            )
    eps = tuple(g / d for g, d in zip(gs, denoms))
    for i, e in enumerate(eps, start=1):
        check_small_parameter(e, f"epsilon_{i}")
    return eps


def diamond_first_order(model: AtomFieldModel,
                        space: CompositeSpace | None = None) -> OperatorMatrix:
    """First-order effective Hamiltonian of the four-level diamond.

    Assembles the free part, the dynamic Stark shift, the photon-assisted
    2<->3 coupling, the two-photon 1<->4 coupling, and the four
    virtual-photon pair terms, with coefficients g_i eps_j fixed by the
    ordered elimination of the four dipole channels.
    """
    if space is None:
        space = atom_field_space(model)
    g1, g2, g3, g4 = _diamond_couplings(model)
    e1, e2, e3, e4 = diamond_small_parameters(model)

    atom_rep, field_rep = space.factors
    field_ladder = build_ladder(field_rep)
    n_ph = space.lift(1, field_ladder.x0)
    ident = OperatorMatrix.identity(space.dim)

    def s(i: int, j: int) -> OperatorMatrix:
        return space.lift(0, collective_un(atom_rep, i, j))

    def plus(lo: int, hi: int) -> OperatorMatrix:
        return s(hi, lo)

    a_low = space.lift(1, field_ladder.minus)
    a2 = a_low @ a_low

    h = free_hamiltonian(model, space)

    stark = (g1 * e1) * (s(2, 2) @ (s(1, 1) + ident) + n_ph @ (s(2, 2) - s(1, 1)))
    stark = stark + (g2 * e2) * (s(3, 3) @ (s(1, 1) + ident) + n_ph @ (s(3, 3) - s(1, 1)))
    stark = stark + (g3 * e3) * (s(4, 4) @ (s(2, 2) + ident) + n_ph @ (s(4, 4) - s(2, 2)))
    stark = stark + (g4 * e4) * (s(4, 4) @ (s(3, 3) + ident) + n_ph @ (s(4, 4) - s(3, 3)))
    h = h + stark

    assisted = (g2 * e1) * (plus(2, 3) @ (s(1, 1) + n_ph + ident))
    assisted = assisted + (g4 * e3) * (plus(2, 3) @ (s(4, 4) - n_ph))
    h = h + assisted + assisted.dag()

    two_photon = (-(g3 * e1 + g4 * e2)) * (a2 @ plus(1, 4))
    h = h + two_photon + two_photon.dag()

    virtual = (g3 * e1) * (plus(2, 4) @ plus(1, 2).dag())
    virtual = virtual + (g3 * e2) * (plus(2, 4) @ plus(1, 3).dag())
    virtual = virtual + (g4 * e1) * (plus(1, 2) @ plus(3, 4).dag())
    virtual = virtual + (g4 * e2) * (plus(1, 3) @ plus(3, 4).dag())
    h = h + virtual + virtual.dag()
    return h.as_hermitian()


def diamond_generators(model: AtomFieldModel,
                       space: CompositeSpace | None = None
                       ) -> list[tuple[float, OperatorMatrix]]:
    """The four elimination generators (eps_i, a S_+^{ch} - h.c.), channel order."""
    if space is None:
        space = atom_field_space(model)
    eps = diamond_small_parameters(model)
    atom_rep, field_rep = space.factors
    a_low = space.lift(1, build_ladder(field_rep).minus)
    out = []
    for e, (lo, hi) in zip(eps, DIAMOND_CHANNELS):
        g_op = a_low @ space.lift(0, collective_un(atom_rep, hi, lo))
        out.append((e, g_op - g_op.dag()))
    return out


def diamond_conjugated(model: AtomFieldModel,
                       space: CompositeSpace | None = None) -> OperatorMatrix:
    """Exact U4 U3 U2 U1 H U1^dag.. with U_i = exp(eps_i A_i); oracle for the closed form."""
    if space is None:
        space = atom_field_space(model)
    h = atom_field_hamiltonian(model, space).array
    for e, gen in diamond_generators(model, space):
        u = expm(e * gen.array)
        h = u @ h @ u.conj().T
    return OperatorMatrix(h)


# -- approximate integrals of motion -----------------------------------------------


@dataclass(frozen=True)
class IntegralOfMotion:
    """Resonance indices (k, l) with the conserved combination through O(delta^2)."""

    k: int
    l: int
    operator: OperatorMatrix


def integral_of_motion_nkl(k: int, l: int, system: TwoLadderSystem,
                           delta: float) -> IntegralOfMotion:
    """Approximate invariant of the (k, l) resonance of the counter-rotating Dicke model.

    N^(kl) = (2l+k) Sz + k a^dag a + 2 k delta (S+ + S-)(a^dag + a)
             - (2 k^2 delta^2 / (l (l+k))) [(2l+k) Sz (2 a^dag a + 1) - k Sz^2]

    valid for the odd family k = 1 and the even family k = 2 with odd l; at
    l = 0 the delta^2 coefficient is singular and the principal invariant
    Sz + a^dag a applies instead.
    """
    if l == 0:
        raise ValueError("l = 0 is the principal resonance; use Sz + a^dag a")
    if k not in (1, 2):
        raise ValueError("resonant families carry k = 1 (odd) or k = 2 (even)")
    if k == 2 and l % 2 == 0:
        raise ValueError("the even family requires odd l")
    sz = system.x0
    n_ph = system.y0
    ident = OperatorMatrix.identity(system.dim)
    coupling = (system.xp + system.xm) @ (system.yp + system.ym)
    quad = (2 * l + k) * (sz @ (2.0 * n_ph + ident)) - float(k) * (sz @ sz)
    op = ((2 * l + k) * sz + float(k) * n_ph
          + (2.0 * k * delta) * coupling
          - (2.0 * k * k * delta * delta / (l * (l + k))) * quad)
    return IntegralOfMotion(k, l, op.as_hermitian())


__all__ = [
    "ResonantRegimeError",
    "RotationGenerator",
    "bch_transform",
    "sector_component",
    "eliminate_term",
    "series_prefactor",
    "theta_table",
    "theta_coefficient",
    "SeriesTerm",
    "EffectiveSeries",
    "primitive_pair",
    "stark_diagonal",
    "nonrwa_series",
    "dicke_dispersive",
    "diamond_denominators",
    "diamond_small_parameters",
    "diamond_first_order",
    "diamond_generators",
    "diamond_conjugated",
    "IntegralOfMotion",
    "integral_of_motion_nkl",
]
