"""Resonance enumeration and effective Hamiltonians for atom-field models."""

__version__ = "0.1.0"

from .operators import (
    CompositeSpace,
    Ladder,
    OperatorMatrix,
    Representation,
    StructuralFunction,
    build_ladder,
    collective_un,
    commutator,
    lift,
)
from .resonances import (
    AtomFieldModel,
    DipoleChannel,
    ResonanceCondition,
    ResonanceVector,
    build_interaction_operator,
    classify,
    diamond_model,
    enumerate_conditions,
    enumerate_vectors,
    resonance_defect,
    solve_resonant_frequency,
    two_level_model,
)
from .effective import (
    EffectiveSeries,
    ResonantRegimeError,
    RotationGenerator,
    bch_transform,
    diamond_first_order,
    dicke_dispersive,
    eliminate_term,
    integral_of_motion_nkl,
    nonrwa_series,
    theta_table,
)
from .models import (
    classical_drive,
    dicke_system,
    floquet_dicke,
    nonrwa_dicke,
    rwa_dicke,
    two_ladder_system,
)
from .verify import (
    compare_effective_vs_exact,
    conservation_drift,
    diagonalize,
    evolve,
    evolve_periodic,
    monodromy,
    scan_resonances,
)

__all__ = [
    "AtomFieldModel",
    "CompositeSpace",
    "DipoleChannel",
    "EffectiveSeries",
    "Ladder",
    "OperatorMatrix",
    "Representation",
    "ResonanceCondition",
    "ResonanceVector",
    "ResonantRegimeError",
    "RotationGenerator",
    "StructuralFunction",
    "bch_transform",
    "build_interaction_operator",
    "build_ladder",
    "classical_drive",
    "classify",
    "collective_un",
    "commutator",
    "compare_effective_vs_exact",
    "conservation_drift",
    "diagonalize",
    "diamond_first_order",
    "diamond_model",
    "dicke_dispersive",
    "dicke_system",
    "eliminate_term",
    "enumerate_conditions",
    "enumerate_vectors",
    "evolve",
    "evolve_periodic",
    "floquet_dicke",
    "integral_of_motion_nkl",
    "lift",
    "monodromy",
    "nonrwa_dicke",
    "nonrwa_series",
    "resonance_defect",
    "rwa_dicke",
    "scan_resonances",
    "solve_resonant_frequency",
    "theta_table",
    "two_ladder_system",
    "two_level_model",
]
