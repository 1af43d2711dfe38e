"""Dense matrix representations of deformed ladder algebras.

Every finite representation used by the toolkit (truncated boson, collective
spin, symmetric u(N) multiplet, truncated phase/Euclidean ladder) is built
here as a triple of ladder operators (X0, X+, X-) together with the
structural function phi(X0) = X+ X-.  Composite spaces are plain Kronecker
products with identity padding.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

HERMITICITY_TOL = 1e-12


class OperatorMatrix:
    """A dense complex square matrix tagged with its dimension and Hermiticity.

    The array is frozen after construction; all arithmetic returns new
    instances, so values can be shared freely across threads.
    """

    __slots__ = ("array", "dim", "hermitian")

    def __init__(self, array: np.ndarray, hermitian: bool = False):
        arr = np.ascontiguousarray(array, dtype=complex)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError(f"operator must be square, got shape {arr.shape}")
        if arr.shape[0] < 1:
            raise ValueError("operator dimension must be positive")
        if hermitian:
            scale = np.linalg.norm(arr)
            defect = np.abs(arr - arr.conj().T).max()
            if defect > HERMITICITY_TOL * max(scale, 1.0):
                raise ValueError(
                    f"hermitian tag set but max|A - A^dag| = {defect:.3e} "
                    f"exceeds {HERMITICITY_TOL:.0e} * norm"
                )
        arr.setflags(write=False)
        self.array = arr
        self.dim = arr.shape[0]
        self.hermitian = hermitian

    # -- constructors -------------------------------------------------------

    @staticmethod
    def identity(dim: int) -> "OperatorMatrix":
        return OperatorMatrix(np.eye(dim), hermitian=True)

    @staticmethod
    def diagonal(values: Sequence[float]) -> "OperatorMatrix":
        vals = np.asarray(values)
        herm = bool(np.all(np.abs(vals.imag if np.iscomplexobj(vals) else 0.0) == 0.0))
        return OperatorMatrix(np.diag(np.asarray(values, dtype=complex)), hermitian=herm)

    @staticmethod
    def zeros(dim: int) -> "OperatorMatrix":
        return OperatorMatrix(np.zeros((dim, dim)), hermitian=True)

    # -- arithmetic ----------------------------------------------------------

    def _check_dim(self, other: "OperatorMatrix") -> None:
        if self.dim != other.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __add__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        self._check_dim(other)
        return OperatorMatrix(self.array + other.array,
                              hermitian=self.hermitian and other.hermitian)

    def __sub__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        self._check_dim(other)
        return OperatorMatrix(self.array - other.array,
                              hermitian=self.hermitian and other.hermitian)

    def __neg__(self) -> "OperatorMatrix":
        return OperatorMatrix(-self.array, hermitian=self.hermitian)

    def __mul__(self, scalar) -> "OperatorMatrix":
        herm = self.hermitian and (np.imag(scalar) == 0.0)
        return OperatorMatrix(self.array * scalar, hermitian=bool(herm))

    __rmul__ = __mul__

    def __matmul__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        self._check_dim(other)
        return OperatorMatrix(self.array @ other.array)

    def dag(self) -> "OperatorMatrix":
        return OperatorMatrix(self.array.conj().T, hermitian=self.hermitian)

    def power(self, exponent: int) -> "OperatorMatrix":
        if exponent < 0:
            raise ValueError("negative powers are not defined for ladder factors")
        return OperatorMatrix(np.linalg.matrix_power(self.array, exponent))

    def tensor(self, other: "OperatorMatrix") -> "OperatorMatrix":
        return OperatorMatrix(np.kron(self.array, other.array),
                              hermitian=self.hermitian and other.hermitian)

    # -- queries -------------------------------------------------------------

    def norm(self) -> float:
        """Frobenius norm, the default norm throughout the package."""
        return float(np.linalg.norm(self.array))

    def hermiticity_defect(self) -> float:
        return float(np.abs(self.array - self.array.conj().T).max())

    def as_hermitian(self) -> "OperatorMatrix":
        """Re-tag as Hermitian, validating the numerical defect."""
        return OperatorMatrix(self.array, hermitian=True)

    def real_diagonal(self) -> np.ndarray:
        return self.array.diagonal().real.copy()

    def __repr__(self) -> str:  # pragma: no cover
        tag = "hermitian" if self.hermitian else "general"
        return f"OperatorMatrix(dim={self.dim}, {tag})"


def commutator(a: OperatorMatrix, b: OperatorMatrix) -> OperatorMatrix:
    """[A, B] = AB - BA.  Raises on dimension mismatch."""
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    return OperatorMatrix(a.array @ b.array - b.array @ a.array)


@dataclass(frozen=True)
class StructuralFunction:
    """Polynomial phi with phi(X0) = X+ X- on the attached representation.

    ``coefficients`` are ordered highest power first (numpy.polyval
    convention).  ``euclidean`` marks the constant phi = 1 of the phase
    ladder, whose hard truncation breaks X+ X- = 1 only at the edge.
    """

    coefficients: tuple[float, ...]
    euclidean: bool = False

    def __call__(self, z):
        return np.polyval(self.coefficients, z)

    @property
    def degree(self) -> int:
        coeffs = np.asarray(self.coefficients, dtype=float)
        nz = np.nonzero(np.abs(coeffs) > 0.0)[0]
        if nz.size == 0:
            return 0
        return len(coeffs) - 1 - int(nz[0])

    def difference(self, z):
        """Commutator polynomial P(z) = phi(z) - phi(z + 1) = [X+, X-] on labels."""
        return self(z) - self(np.asarray(z) + 1)

    def iterated_difference(self, order: int, z):
        """order-fold forward difference of phi; order 0 returns phi(z)."""
        z = np.asarray(z, dtype=float)
        total = np.zeros_like(z)
        for i in range(order + 1):
            total = total + ((-1) ** i) * math.comb(order, i) * self(z + i)
        return total


@dataclass(frozen=True)
class Representation:
    """A finite carrier space for one subsystem.

    kind is one of ``boson`` (Fock space truncated at n_max), ``spin``
    (collective su(2) of `atoms` two-level atoms, S = atoms/2), ``symmetric_un``
    (permutation-symmetric multiplet of `atoms` n_levels-level atoms, labels
    are occupation vectors), ``euclid`` (phase ladder with labels -m..m) or
    ``deformed`` (ladder with a prescribed polynomial structural function).
    """

    kind: str
    dim: int
    labels: tuple
    atoms: int | None = None
    n_levels: int | None = None
    n_max: int | None = None
    m_range: int | None = None
    phi_coefficients: tuple[float, ...] | None = None

    # -- constructors --------------------------------------------------------

    @staticmethod
    def boson(n_max: int) -> "Representation":
        if n_max < 0:
            raise ValueError("n_max must be >= 0")
        return Representation("boson", n_max + 1, tuple(range(n_max + 1)), n_max=n_max)

    @staticmethod
    def spin(atoms: int) -> "Representation":
        if atoms < 1:
            raise ValueError("atom count must be >= 1")
        s = atoms / 2.0
        labels = tuple(-s + i for i in range(atoms + 1))
        return Representation("spin", atoms + 1, labels, atoms=atoms)

    @staticmethod
    def symmetric_un(n_levels: int, atoms: int) -> "Representation":
        if n_levels < 2:
            raise ValueError("need at least two atomic levels")
        if atoms < 1:
            raise ValueError("atom count must be >= 1")
        labels = tuple(sorted(occupation_vectors(n_levels, atoms)))
        dim = math.comb(atoms + n_levels - 1, n_levels - 1)
        assert len(labels) == dim
        return Representation("symmetric_un", dim, labels,
                              atoms=atoms, n_levels=n_levels)

    @staticmethod
    def euclid(m_range: int) -> "Representation":
        if m_range < 1:
            raise ValueError("m_range must be >= 1")
        labels = tuple(range(-m_range, m_range + 1))
        return Representation("euclid", 2 * m_range + 1, labels, m_range=m_range)

    @staticmethod
    def deformed(phi_coefficients: Sequence[float], dim: int,
                 z_origin: float = 0.0) -> "Representation":
        """Ladder with X+|z> = sqrt(phi(z+1))|z+1> on labels z_origin..z_origin+dim-1."""
        if dim < 1:
            raise ValueError("dim must be >= 1")
        labels = tuple(z_origin + i for i in range(dim))
        phi = tuple(float(c) for c in phi_coefficients)
        vals = np.polyval(phi, np.array(labels[1:], dtype=float)) if dim > 1 else np.array([])
        if np.any(vals < -1e-12):
            raise ValueError("phi must be nonnegative on the interior labels")
        return Representation("deformed", dim, labels, phi_coefficients=phi)

    # -- masks ----------------------------------------------------------------

    def interior_mask(self, margin: int = 1) -> np.ndarray:
        """0/1 vector excluding labels corrupted by hard truncation.

        ``margin`` widens the excluded band for operators that hop several
        steps at once.  spin and symmetric_un carry exact algebras and keep
        every label.
        """
        mask = np.ones(self.dim)
        if self.kind == "boson":
            mask[max(self.dim - margin, 0):] = 0.0
        elif self.kind == "euclid":
            mask[: min(margin, self.dim)] = 0.0
            mask[max(self.dim - margin, 0):] = 0.0
        elif self.kind == "deformed":
            mask[max(self.dim - margin, 0):] = 0.0
            phi = StructuralFunction(self.phi_coefficients)
            if abs(float(phi(self.labels[0]))) > 1e-12:
                mask[: min(margin, self.dim)] = 0.0
        return mask

    def numeric_labels(self) -> np.ndarray:
        if self.kind == "symmetric_un":
            raise ValueError("occupation-vector labels are not scalar")
        return np.array(self.labels, dtype=float)


def occupation_vectors(n_levels: int, atoms: int) -> list[tuple[int, ...]]:
    """All occupation tuples (n_1..n_N) with sum = atoms, lexicographic order."""
    out: list[tuple[int, ...]] = []
    for cuts in itertools.combinations(range(atoms + n_levels - 1), n_levels - 1):
        occ = []
        prev = -1
        for c in cuts:
            occ.append(c - prev - 1)
            prev = c
        occ.append(atoms + n_levels - 2 - prev)
        out.append(tuple(occ))
    return sorted(out)


@dataclass(frozen=True)
class Ladder:
    """Ladder triple on one representation plus its structural function.

    ``interior`` is a diagonal 0/1 projector masking truncation-corrupted
    labels; on exact representations it is the identity.
    """

    rep: Representation
    x0: OperatorMatrix
    plus: OperatorMatrix
    minus: OperatorMatrix
    phi: StructuralFunction
    interior: OperatorMatrix


def build_ladder(rep: Representation) -> Ladder:
    """Construct (X0, X+, X-) with [X0, X+-] = +-X+- and X+X- = phi(X0).

    Parameters
    ----------
    rep : Representation
        boson, spin, euclid or deformed kind.  symmetric_un has no canonical
        single ladder; use :func:`collective_un` for its generators.

    Returns
    -------
    Ladder
        Operators, structural function, and the interior projector that
        masks the hard-truncation edge (boson: top Fock label; euclid: both
        ends; spin: nothing).
    """
    if rep.kind == "symmetric_un":
        raise ValueError(
            "symmetric u(N) multiplets have no canonical ladder triple; "
            "use collective_un(rep, i, j) for the generators"
        )
    if rep.dim <= 0:
        raise ValueError("dimension must be positive")

    labels = rep.numeric_labels()
    x0 = OperatorMatrix.diagonal(labels)

    up = np.zeros((rep.dim, rep.dim), dtype=complex)
    if rep.kind == "boson":
        for n in range(rep.dim - 1):
            up[n + 1, n] = math.sqrt(n + 1)
        phi = StructuralFunction((1.0, 0.0))
    elif rep.kind == "spin":
        s = rep.atoms / 2.0
        for i in range(rep.dim - 1):
            m = labels[i]
            up[i + 1, i] = math.sqrt(s * (s + 1) - m * (m + 1))
        phi = StructuralFunction((-1.0, 1.0, s * (s + 1)))
    elif rep.kind == "euclid":
        for i in range(rep.dim - 1):
            up[i + 1, i] = 1.0
        phi = StructuralFunction((1.0,), euclidean=True)
    elif rep.kind == "deformed":
        phi = StructuralFunction(rep.phi_coefficients)
        for i in range(rep.dim - 1):
            up[i + 1, i] = math.sqrt(max(float(phi(labels[i + 1])), 0.0))
    else:
        raise ValueError(f"unknown representation kind {rep.kind!r}")

    plus = OperatorMatrix(up)
    return Ladder(rep=rep, x0=x0, plus=plus, minus=plus.dag(), phi=phi,
                  interior=OperatorMatrix.diagonal(rep.interior_mask()))


def collective_un(rep: Representation, i: int, j: int) -> OperatorMatrix:
    """Collective generator S^{ij} on a symmetric u(N) multiplet.

    S^{ij} moves one atom from level j to level i: it maps an occupation
    (..n_i.., ..n_j..) to (..n_i+1.., ..n_j-1..) with matrix element
    sqrt((n_i + 1) n_j); S^{ii} is diagonal with value n_i.  Indices are
    1-based.  The generators satisfy
    [S^{ij}, S^{km}] = delta_{jk} S^{im} - delta_{im} S^{kj}.
    """
    if rep.kind != "symmetric_un":
        raise ValueError("collective_un needs a symmetric_un representation")
    n = rep.n_levels
    if not (1 <= i <= n and 1 <= j <= n):
        raise ValueError(f"level indices must be in 1..{n}, got ({i}, {j})")
    index = {occ: p for p, occ in enumerate(rep.labels)}
    mat = np.zeros((rep.dim, rep.dim), dtype=complex)
    if i == j:
        for p, occ in enumerate(rep.labels):
            mat[p, p] = occ[i - 1]
        return OperatorMatrix(mat, hermitian=True)
    for p, occ in enumerate(rep.labels):
        if occ[j - 1] == 0:
            continue
        target = list(occ)
        target[i - 1] += 1
        target[j - 1] -= 1
        q = index[tuple(target)]
        mat[q, p] = math.sqrt((occ[i - 1] + 1) * occ[j - 1])
    return OperatorMatrix(mat)


def atomic_transition(rep: Representation, lower: int, upper: int) -> OperatorMatrix:
    """Raising operator for the transition lower -> upper (one atom moves up)."""
    if lower >= upper:
        raise ValueError("transition must go from a lower to an upper level")
    return collective_un(rep, upper, lower)


def level_population(rep: Representation, level: int) -> OperatorMatrix:
    """Diagonal population operator S^{jj} of one atomic level."""
    return collective_un(rep, level, level)


class CompositeSpace:
    """Ordered tensor product of factor representations.

    Operators on a single factor are lifted by identity padding; lifted
    operators on distinct factors commute exactly.
    """

    def __init__(self, factors: Iterable[Representation]):
        self.factors = tuple(factors)
        if not self.factors:
            raise ValueError("need at least one factor")
        self.dim = int(np.prod([f.dim for f in self.factors]))

    def lift(self, factor_index: int, op: OperatorMatrix) -> OperatorMatrix:
        """identity x .. x op x .. x identity in the declared factor order."""
        if not (0 <= factor_index < len(self.factors)):
            raise IndexError(f"factor index {factor_index} out of range")
        if op.dim != self.factors[factor_index].dim:
            raise ValueError(
                f"operator dim {op.dim} does not match factor dim "
                f"{self.factors[factor_index].dim}"
            )
        out = np.array([[1.0 + 0.0j]])
        for pos, factor in enumerate(self.factors):
            block = op.array if pos == factor_index else np.eye(factor.dim)
            out = np.kron(out, block)
        return OperatorMatrix(out, hermitian=op.hermitian)

    def label_grid(self, factor_index: int) -> np.ndarray:
        """Numeric labels of one factor broadcast along the composite diagonal."""
        axes = [f.numeric_labels() if p == factor_index else np.zeros(f.dim)
                for p, f in enumerate(self.factors)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return mesh[factor_index].reshape(-1)

    def interior_projector(self, margins: dict[int, int] | int = 1) -> OperatorMatrix:
        """Kronecker product of factor interior masks.

        ``margins`` may be a single margin for every factor or a mapping
        factor_index -> margin.
        """
        masks = []
        for pos, factor in enumerate(self.factors):
            margin = margins.get(pos, 1) if isinstance(margins, dict) else margins
            masks.append(factor.interior_mask(margin))
        diag = masks[0]
        for m in masks[1:]:
            diag = np.kron(diag, m)
        return OperatorMatrix.diagonal(diag)

    def basis_index(self, *factor_positions: int) -> int:
        """Flat composite index of a product basis state given per-factor positions."""
        if len(factor_positions) != len(self.factors):
            raise ValueError("need one position per factor")
        idx = 0
        for pos, factor in zip(factor_positions, self.factors):
            if not (0 <= pos < factor.dim):
                raise IndexError("basis position out of range")
            idx = idx * factor.dim + pos
        return idx

    def basis_state(self, *factor_positions: int) -> np.ndarray:
        vec = np.zeros(self.dim, dtype=complex)
        vec[self.basis_index(*factor_positions)] = 1.0
        return vec


def lift(space: CompositeSpace, factor_index: int, op: OperatorMatrix) -> OperatorMatrix:
    """Module-level alias of :meth:`CompositeSpace.lift`."""
    return space.lift(factor_index, op)
