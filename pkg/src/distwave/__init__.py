"""Distorted plane-wave analysis for 1-d Schrodinger operators -d2/dx2 + V.

The package tabulates generalized eigenfunctions from Jost solutions, forms
the associated transform pair, finds the bound states, and assembles the
integral kernels of compactly supported spectral multipliers phi(H). A
small dense-matrix reference model (oracle) backs the validation paths.
"""

from ._backend import backend_name, set_threads
from .boundstates import BoundState, find_bound_states, point_projection
from .errors import (
    ConfigError,
    DistwaveError,
    ExceptionalFrequencyError,
    IntegrationError,
    PreconditionError,
)
from .grids import GridSpec, make_xi_grid, trapezoid_weights
from .jost import (
    EigenBasis,
    JostSolution,
    ScatteringData,
    build_eigenbasis,
    generalized_eigenfunction,
    max_ode_residual,
    ode_residuals,
    scattering_coefficients,
    solve_jost,
)
from .oracle import DiscreteHamiltonian, discretize, functional_calculus
from .potentials import PRESETS, Potential, make_preset, sample
from .spectral import (
    Kernel,
    Multiplier,
    apply_spectral,
    apply_via_transform,
    kernel_ac,
    kernel_point,
    kernel_total,
    multiplier_preset,
)
from .transform import (
    TransformResult,
    adjoint,
    forward,
    intertwining_defect,
    plancherel_defect,
    roundtrip_defect,
)

__version__ = "0.1.0"

__all__ = [
    "BoundState",
    "ConfigError",
    "DiscreteHamiltonian",
    "DistwaveError",
    "EigenBasis",
    "ExceptionalFrequencyError",
    "GridSpec",
    "IntegrationError",
    "JostSolution",
    "Kernel",
    "Multiplier",
    "PRESETS",
    "Potential",
    "PreconditionError",
    "ScatteringData",
    "TransformResult",
    "adjoint",
    "apply_spectral",
    "apply_via_transform",
    "backend_name",
    "build_eigenbasis",
    "discretize",
    "find_bound_states",
    "forward",
    "functional_calculus",
    "generalized_eigenfunction",
    "intertwining_defect",
    "kernel_ac",
    "kernel_point",
    "kernel_total",
    "make_preset",
    "make_xi_grid",
    "max_ode_residual",
    "multiplier_preset",
    "ode_residuals",
    "plancherel_defect",
    "point_projection",
    "roundtrip_defect",
    "sample",
    "scattering_coefficients",
    "set_threads",
    "solve_jost",
    "trapezoid_weights",
    "__version__",
]
