"""Escape rates from metastable wells with semiclassical quantum corrections.

Analytic Kramers-type rates (classical, wavepacket-corrected, digamma-
corrected) together with three independent numerical oracles: overdamped
Langevin ensembles, the mean-first-passage-time quadrature, and a
Smoluchowski finite-difference solver.
"""

from .errors import (
    DiscretizationError,
    EstimationError,
    ExtractionError,
    NumericsError,
    QuadratureError,
    ScenarioError,
    SingularityError,
    StructureError,
    WidthCollapseError,
)
from .fokker_planck import (
    DecayFit,
    DriftDiffusionOperator,
    GridDensity,
    boltzmann_profile,
    decay_rate,
    discretize,
    evolve,
    well_profile,
)
from .langevin import (
    EnsembleResult,
    EscapeConfig,
    NoiseModel,
    default_escape_config,
    default_timestep,
    equilibrium_sample,
    inertial_step,
    mfpt_ensemble,
    mfpt_quadrature,
    overdamped_step,
)
from .potentials import Potential, StationaryAnalysis, find_stationary_points
from .rates import (
    RateResult,
    ValidityReport,
    classical_rate,
    digamma,
    doubled_exponent_rate,
    quantum_diffusion,
    quantum_smoluchowski_rate,
    semiclassical_rate_approx,
    semiclassical_rate_exact,
    validity_report,
)
from .semiclassical import (
    Moments,
    PhysParams,
    StateDerivative,
    Trajectory,
    VariationalState,
    effective_potential,
    eom_rhs,
    expectation_values,
    integrate_eom,
    quasi_stationary_G,
    quasi_stationary_residual,
    semiclassical_hamiltonian,
    uncertainty_product,
)

__version__ = "0.1.0"

__all__ = [
    "DecayFit",
    "DiscretizationError",
    "DriftDiffusionOperator",
    "EnsembleResult",
    "EscapeConfig",
    "EstimationError",
    "ExtractionError",
    "GridDensity",
    "Moments",
    "NoiseModel",
    "NumericsError",
    "PhysParams",
    "Potential",
    "QuadratureError",
    "RateResult",
    "ScenarioError",
    "SingularityError",
    "StateDerivative",
    "StationaryAnalysis",
    "StructureError",
    "Trajectory",
    "ValidityReport",
    "VariationalState",
    "WidthCollapseError",
    "boltzmann_profile",
    "classical_rate",
    "decay_rate",
    "default_escape_config",
    "default_timestep",
    "digamma",
    "discretize",
    "doubled_exponent_rate",
    "effective_potential",
    "eom_rhs",
    "equilibrium_sample",
    "evolve",
    "expectation_values",
    "find_stationary_points",
    "inertial_step",
    "integrate_eom",
    "mfpt_ensemble",
    "mfpt_quadrature",
    "overdamped_step",
    "quantum_diffusion",
    "quantum_smoluchowski_rate",
    "quasi_stationary_G",
    "quasi_stationary_residual",
    "semiclassical_hamiltonian",
    "semiclassical_rate_approx",
    "semiclassical_rate_exact",
    "uncertainty_product",
    "validity_report",
    "well_profile",
]
