"""Quantum walks of photon pairs in linear and nonlinear waveguide lattices."""

__version__ = "0.1.0"

from .analysis import (CorrelationMatrix, NonClassicalityReport, classical_two_beam_correlation,
                       correlation, nonclassicality, phase_free_fidelity, sample_counts,
                       schmidt_number, similarity)
from .errors import ConfigurationError, QuadratureError
from .inverse_design import (DesignProblem, DesignResult, OptimizeSettings, RobustnessStats,
                             TargetState, objective, optimize, robustness_sweep)
from .lattice import (LatticeSpec, Propagator, hamiltonian, propagator,
                      single_photon_amplitude_infinite)
from .linear_walk import (BiphotonState, InputSpec, propagate_linear,
                          stabilization_threshold_linear)
from .nonlinear_walk import (PumpProfile, SpdcSettings, marginal_evolution, momentum_grid,
                             real_space_from_momentum, spdc_state, spdc_state_momentum,
                             stabilization_threshold_nonlinear)

__all__ = [
    "__version__",
    "BiphotonState",
    "ConfigurationError",
    "CorrelationMatrix",
    "DesignProblem",
    "DesignResult",
    "InputSpec",
    "LatticeSpec",
    "NonClassicalityReport",
    "OptimizeSettings",
    "Propagator",
    "PumpProfile",
    "QuadratureError",
    "RobustnessStats",
    "SpdcSettings",
    "TargetState",
    "classical_two_beam_correlation",
    "correlation",
    "hamiltonian",
    "marginal_evolution",
    "momentum_grid",
    "nonclassicality",
    "objective",
    "optimize",
    "phase_free_fidelity",
    "propagate_linear",
    "propagator",
    "real_space_from_momentum",
    "robustness_sweep",
    "sample_counts",
    "schmidt_number",
    "similarity",
    "single_photon_amplitude_infinite",
    "spdc_state",
    "spdc_state_momentum",
    "stabilization_threshold_linear",
    "stabilization_threshold_nonlinear",
]
