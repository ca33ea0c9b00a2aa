"""Balance identities and variational bounds for a spin-oscillator model.

The package splits into small layers: `fock` holds the truncated
oscillator algebra, `model` the Hamiltonians and parity bookkeeping,
`solver` the exact ground state, `balance` the identity and bound
checks, `variational` the displaced-squeezed trial family, and `cli`
the command-line front end.
"""

from .balance import (
    BalanceReport,
    BoundCheck,
    b1_kinetic_balance,
    b2_variance_bounds,
    b7_covariance_balance,
    displaced_number,
    first_order_residual,
    full_report,
    property_checks,
    report_passes,
    second_order_residual,
    standard_observables,
    wigner_energy_bounds,
    wigner_origin,
)
from .errors import (
    AmplitudeTooLarge,
    ConfigError,
    DimensionMismatch,
    DisplacementTooLarge,
    EigDecompositionFailure,
    NonHermitian,
    NotConverged,
    OptimizerStalled,
    RabiError,
    SectorRequired,
    SqueezeTooLarge,
)
from .fock import (
    BOSON,
    SPIN_BOSON,
    FockRep,
    Observable,
    QuantumState,
    build_ladder,
    build_quadratures,
    displacement,
    expectation,
    fock_state,
    squeeze,
    variance,
)
from .model import (
    ModelParams,
    build_full_hamiltonian,
    build_parity_operator,
    build_reduced_hamiltonian,
    embed_reduced_state,
    extract_reduced_state,
    infer_sector,
)
from .solver import GroundSolution, convergence_table, solve_rabi_ground, spectrum_head
from .variational import (
    OptimizerOptions,
    TrialParams,
    VariationalResult,
    balance_residuals,
    energy_closed_form,
    energy_numeric,
    minimize_energy,
    stationarity_equals_balance,
    trial_property_compliance,
    trial_state,
)

__version__ = "0.1.0"

__all__ = [
    "AmplitudeTooLarge",
    "BOSON",
    "BalanceReport",
    "BoundCheck",
    "ConfigError",
    "DimensionMismatch",
    "DisplacementTooLarge",
    "EigDecompositionFailure",
    "FockRep",
    "GroundSolution",
    "ModelParams",
    "NonHermitian",
    "NotConverged",
    "Observable",
    "OptimizerOptions",
    "OptimizerStalled",
    "QuantumState",
    "RabiError",
    "SPIN_BOSON",
    "SectorRequired",
    "SqueezeTooLarge",
    "TrialParams",
    "VariationalResult",
    "b1_kinetic_balance",
    "b2_variance_bounds",
    "b7_covariance_balance",
    "balance_residuals",
    "build_full_hamiltonian",
    "build_ladder",
    "build_parity_operator",
    "build_quadratures",
    "build_reduced_hamiltonian",
    "convergence_table",
    "displaced_number",
    "displacement",
    "embed_reduced_state",
    "energy_closed_form",
    "energy_numeric",
    "expectation",
    "extract_reduced_state",
    "first_order_residual",
    "fock_state",
    "full_report",
    "infer_sector",
    "minimize_energy",
    "property_checks",
    "report_passes",
    "second_order_residual",
    "solve_rabi_ground",
    "spectrum_head",
    "squeeze",
    "stationarity_equals_balance",
    "standard_observables",
    "trial_property_compliance",
    "trial_state",
    "variance",
    "wigner_energy_bounds",
    "wigner_origin",
]
