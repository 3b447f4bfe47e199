"""Thermal-field quantum optics in 1D layered structures.

Computes local quantum-optical observables of thermal electromagnetic fields
(electric LDOS, effective photon number, effective field temperature,
spectral Poynting vector, net emission rate) in layered geometries, and
solves self-consistent steady-state temperature profiles of lossy cavity
media. See the README for the CLI and configuration format.
"""

from .constants import CONSTANTS, ELEMENTARY_CHARGE, PhysicalConstants
from .greens import (
    GreenComponents,
    GreenSolver,
    ScaledGreens,
    green_homogeneous,
    green_layered,
    scaled_greens,
)
from .materials import (
    CellTemperatures,
    Layer,
    LayerStack,
    Material,
    SpectralGrid,
    j0_squared,
    n_at,
    temperature_at,
    temperatures_at,
)
from .observables import (
    DegenerateLDOSError,
    FieldMap,
    bose_einstein,
    effective_temperature,
    field_map,
    ldos,
    net_emission,
    photon_number,
    poynting_spectral,
)
from .oracle import green_oracle, oracle_profile
from .quadrature import (
    QuadratureError,
    QuadratureSpec,
    integrate_sources,
    integrate_spectrum,
)
from .selfconsistent import CavitySolution, SolverSpec, cell_power_residual, solve_cavity_temperatures

__version__ = "0.1.0"

__all__ = [
    "CONSTANTS",
    "ELEMENTARY_CHARGE",
    "PhysicalConstants",
    "Material",
    "Layer",
    "CellTemperatures",
    "LayerStack",
    "SpectralGrid",
    "n_at",
    "temperature_at",
    "temperatures_at",
    "j0_squared",
    "GreenComponents",
    "ScaledGreens",
    "GreenSolver",
    "green_homogeneous",
    "green_layered",
    "scaled_greens",
    "green_oracle",
    "oracle_profile",
    "QuadratureSpec",
    "QuadratureError",
    "integrate_sources",
    "integrate_spectrum",
    "DegenerateLDOSError",
    "FieldMap",
    "ldos",
    "bose_einstein",
    "photon_number",
    "effective_temperature",
    "poynting_spectral",
    "net_emission",
    "field_map",
    "SolverSpec",
    "CavitySolution",
    "cell_power_residual",
    "solve_cavity_temperatures",
    "__version__",
]
