"""isospec: strictly isospectral oscillator families, the unitary map
between them, and their coherent and squeezed states, with every claim of
the construction checked by independent numerical oracles."""

__version__ = "0.1.0"

from .basis import (
    PSI_TAG,
    THETA_TAG,
    BasisSet,
    FockVector,
    apply_lowering,
    apply_raising,
    build_oscillator_basis,
    load_basis_csv,
    quadrature_moments,
    save_basis_csv,
)
from .deform import (
    Deformation,
    deformed_ground_state,
    deformed_state_explicit,
    deformed_state_operator,
    make_deformation,
    riccati_residual,
)
from .numerics import (
    Grid,
    SampledFunction,
    TridiagonalOperator,
    cumulative_integral,
    derivative,
    inner,
    integrate,
    lowest_eigenvalues,
    make_grid,
)
from .states import (
    DisplacementParameter,
    SqueezeParameter,
    annihilation_residual,
    coherent_coefficients,
    coherent_overlap,
    deformed_coherent_wavefunction,
    physical_uncertainties,
    squeezed_coefficients,
    wavefunction_from_coefficients,
)
from .unitary import (
    OverlapMatrix,
    matrix_elements_closed_form,
    overlap_matrix,
    unitarity_defect,
)
from .verify import (
    VerificationReport,
    assemble_hamiltonian,
    base_potential,
    eigen_residual,
    energy_expectation,
    full_report,
    report_to_json,
    report_violations,
)

__all__ = [
    "__version__",
    "PSI_TAG",
    "THETA_TAG",
    "BasisSet",
    "FockVector",
    "apply_lowering",
    "apply_raising",
    "build_oscillator_basis",
    "load_basis_csv",
    "quadrature_moments",
    "save_basis_csv",
    "Deformation",
    "deformed_ground_state",
    "deformed_state_explicit",
    "deformed_state_operator",
    "make_deformation",
    "riccati_residual",
    "Grid",
    "SampledFunction",
    "TridiagonalOperator",
    "cumulative_integral",
    "derivative",
    "inner",
    "integrate",
    "lowest_eigenvalues",
    "make_grid",
    "DisplacementParameter",
    "SqueezeParameter",
    "annihilation_residual",
    "coherent_coefficients",
    "coherent_overlap",
    "deformed_coherent_wavefunction",
    "physical_uncertainties",
    "squeezed_coefficients",
    "wavefunction_from_coefficients",
    "OverlapMatrix",
    "matrix_elements_closed_form",
    "overlap_matrix",
    "unitarity_defect",
    "VerificationReport",
    "assemble_hamiltonian",
    "base_potential",
    "eigen_residual",
    "energy_expectation",
    "full_report",
    "report_to_json",
    "report_violations",
]
