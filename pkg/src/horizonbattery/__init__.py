"""Quantum-battery charging on XY chains with black-hole-metric hoppings."""

__version__ = "0.1.0"

from ._kernels import backend_name
from .charging import (
    ChargeMetrics,
    SweepResult,
    charge_once,
    effective_scrambling,
    make_quench_pair,
    metrics_from_trajectory,
    regularize,
    regularized_charge_scan,
    size_scan,
    sweep_grid,
)
from .dynamics import (
    ChargeTrajectory,
    QuenchSchedule,
    boundary_echo_time,
    delta_energy_series,
    energy_of,
    evolve,
    ground_state,
)
from .lattice import (
    ChainConfig,
    HoppingProfile,
    MetricProfile,
    SingleParticleHamiltonian,
    Spectrum,
    build_hamiltonian,
    build_hoppings,
    chain_spectrum,
    horizon_edge_site,
    metric_eval,
    spectral_data,
)
from .scrambling import (
    CommutatorLadder,
    FitWindowError,
    LyapunovFit,
    OtocSeries,
    fit_lyapunov,
    lyapunov_scan,
    nested_commutator_norms,
    otoc_series,
    site_density_probe,
)

__all__ = [name for name in dir() if not name.startswith("_")]
