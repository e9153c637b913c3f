"""Two probe qubits coupled to an anisotropic XXZ spin chain: exact spectra,
effective two-qubit Hamiltonians, concurrence dynamics and critical fields."""

__version__ = "0.1.0"

from .operators import (
    ALL_SITES,
    END_SITES,
    EXPLICIT,
    OPEN,
    PAULI_DOT,
    PERIODIC,
    SPIN_HALF_DOT,
    ChainSpec,
    CouplingSpec,
    build_chain_hamiltonian,
    build_full_hamiltonian,
    build_interaction,
    pauli_on_site,
    total_sz,
)
from .spectra import (
    CriticalFieldScan,
    Crossing,
    Spectrum,
    eig_hermitian,
    find_level_crossings,
    ground_sector,
    ground_state,
)
from .effective import (
    GExtraction,
    axial_z_coefficient,
    effective_for,
    effective_hamiltonian,
    extract_g,
    g_comparison,
    reference_g_n2,
)
from .dynamics import (
    ConcurrenceTrace,
    XStateElements,
    concurrence_general,
    concurrence_trace,
    concurrence_xstate,
    density_from_state,
    evolve_many,
    evolve_state,
    full_vs_effective,
    partial_trace_chain,
    reduced_qubit_density,
    xstate_from_density,
)
from .experiments import (
    BcFit,
    PeriodEstimate,
    RegionReport,
    SweepResult,
    check_period_scaling,
    critical_field_scaling,
    estimate_period,
    initial_state,
    region_structure,
    sweep_concurrence,
)

__all__ = [name for name in dir() if not name.startswith("_")]
