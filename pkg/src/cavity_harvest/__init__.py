"""Exact Gaussian simulation of vacuum entanglement harvesting in a cavity.

Harmonic-oscillator detectors couple to a massless scalar field in a 1-D
cavity with periodic or Dirichlet walls.  Because the Hamiltonian is
quadratic and switching is sharp, evolution from the joint vacuum is a
symplectic linear map computed exactly (to machine precision) at any
coupling, and every entanglement measure follows from the detector block of
the covariance matrix.
"""

__version__ = "0.1.0"

from .cavity import (
    Boundary,
    CavitySpec,
    DetectorArraySpec,
    QuadraticForm,
    build_coupling_matrix,
    build_free_hamiltonian,
    build_interaction_hamiltonian,
    build_total_hamiltonian,
    mode_frequencies,
    mode_wavenumbers,
)
from .entanglement import (
    EntanglementReport,
    NumericalInconsistencyError,
    analyze_detectors,
    localize_symmetric,
    one_vs_rest_log_negativity,
    tripartite_estimator,
    two_mode_log_negativity,
)
from .evolution import ConditioningError, EvolutionEngine, detector_state
from .gaussian import (
    GaussianState,
    SymplecticTransform,
    global_purity_defect,
    is_physical,
    partial_trace,
    symplectic_eigenvalues,
    symplectic_form,
)
from .sweep import (
    ScenarioSpec,
    SweepAxis,
    SweepGrid,
    compare_boundaries,
    convergence_study,
    default_positions,
    extract_regions,
    run_point,
    sweep,
)

__all__ = [
    "__version__",
    "Boundary",
    "CavitySpec",
    "DetectorArraySpec",
    "QuadraticForm",
    "build_coupling_matrix",
    "build_free_hamiltonian",
    "build_interaction_hamiltonian",
    "build_total_hamiltonian",
    "mode_frequencies",
    "mode_wavenumbers",
    "EntanglementReport",
    "NumericalInconsistencyError",
    "analyze_detectors",
    "localize_symmetric",
    "one_vs_rest_log_negativity",
    "tripartite_estimator",
    "two_mode_log_negativity",
    "ConditioningError",
    "EvolutionEngine",
    "detector_state",
    "GaussianState",
    "SymplecticTransform",
    "global_purity_defect",
    "is_physical",
    "partial_trace",
    "symplectic_eigenvalues",
    "symplectic_form",
    "ScenarioSpec",
    "SweepAxis",
    "SweepGrid",
    "compare_boundaries",
    "convergence_study",
    "default_positions",
    "extract_regions",
    "run_point",
    "sweep",
]
