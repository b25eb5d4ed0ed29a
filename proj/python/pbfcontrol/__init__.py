"""Thermal models of powder-bed builds: controllability, observability,
control/observation energy, and ensemble Kalman filtering.

Composite inputs (geometry, lasers, camera, filter settings) are JSON text
with the same schema the pbfctl command-line tool reads.
"""

from ._core import (
    CaseSystem,
    ConfigError,
    Discrete,
    Eigenstructure,
    FilterRun,
    Mesh,
    ThermalModel,
    assemble,
    build_case,
    build_mesh,
    discretize,
    eigendecompose,
    energy_sweep,
    gramian_closed,
    gramian_discrete_c,
    gramian_discrete_o,
    gramian_finite,
    gramian_lyapunov,
    instantiate_and_rank,
    min_control_energy,
    modal_bounds,
    observation_energy,
    observation_energy_sim,
    rank_tests,
    run_filter,
    ssc_check,
    structural_report,
)

__all__ = [
    "CaseSystem",
    "ConfigError",
    "Discrete",
    "Eigenstructure",
    "FilterRun",
    "Mesh",
    "ThermalModel",
    "assemble",
    "build_case",
    "build_mesh",
    "discretize",
    "eigendecompose",
    "energy_sweep",
    "gramian_closed",
    "gramian_discrete_c",
    "gramian_discrete_o",
    "gramian_finite",
    "gramian_lyapunov",
    "instantiate_and_rank",
    "min_control_energy",
    "modal_bounds",
    "observation_energy",
    "observation_energy_sim",
    "rank_tests",
    "run_filter",
    "ssc_check",
    "structural_report",
]

__version__ = "0.1.0"
