"""Fourier estimation of spot volatility and squared jumps from tick data.

The estimator recovers Fourier coefficients of the spot variance path from
log-price increments via a truncated Bohr convolution of the increment
spectrum, reconstructs the path with a Fejer polynomial, and, in rescaled
form, localizes the squared jumps of the price process.  A seeded
simulation engine and a Monte Carlo harness verify the convergence
behavior end to end.
"""

from .estimator import (
    EstimatorConfig,
    SpotEstimate,
    default_degree,
    default_harmonics,
    double_sum_oracle,
    estimate_coefficients,
    estimate_jump_squares,
    estimate_spot_path,
    fejer_inversion_bound_check,
    residual_diagnostic,
)
from .experiments import (
    EventFrequencies,
    InversionSweepResult,
    JumpRecoveryResult,
    RateFit,
    SweepConfig,
    SweepResult,
    coefficient_error_sweep,
    error_event_frequency,
    inversion_bound_sweep,
    jump_recovery_experiment,
    load_sweep_config,
    rate_regression,
)
from .fourier import (
    CoefficientTable,
    ObservedIncrements,
    bohr_partial,
    fejer_polynomial,
    function_coefficients,
    increment_coefficients,
    jump_coefficients,
    read_coefficients_csv,
    write_coefficients_csv,
)
from .kernels import (
    dirichlet,
    dirichlet_lr_mass,
    dirichlet_rescaled,
    discretized_kernel_bound_gap,
    fejer,
)
from .market_sim import (
    ConstantVol,
    JumpModelCPP,
    JumpRecord,
    PartitionSpec,
    SamplePath,
    SinusoidalShiftVol,
    StateDependentVol,
    local_jump_mass,
    simulate_cpp,
    simulate_diffusion,
    simulate_path,
    subsample,
    substream_seed,
)
from .ticks import TickSeries, ingest_csv

__version__ = "0.1.0"

__all__ = [
    "CoefficientTable",
    "ConstantVol",
    "EstimatorConfig",
    "EventFrequencies",
    "InversionSweepResult",
    "JumpModelCPP",
    "JumpRecord",
    "JumpRecoveryResult",
    "ObservedIncrements",
    "PartitionSpec",
    "RateFit",
    "SamplePath",
    "SinusoidalShiftVol",
    "SpotEstimate",
    "StateDependentVol",
    "SweepConfig",
    "SweepResult",
    "TickSeries",
    "bohr_partial",
    "coefficient_error_sweep",
    "default_degree",
    "default_harmonics",
    "dirichlet",
    "dirichlet_lr_mass",
    "dirichlet_rescaled",
    "discretized_kernel_bound_gap",
    "double_sum_oracle",
    "error_event_frequency",
    "estimate_coefficients",
    "estimate_jump_squares",
    "estimate_spot_path",
    "fejer",
    "fejer_inversion_bound_check",
    "fejer_polynomial",
    "function_coefficients",
    "increment_coefficients",
    "ingest_csv",
    "inversion_bound_sweep",
    "jump_coefficients",
    "jump_recovery_experiment",
    "load_sweep_config",
    "local_jump_mass",
    "rate_regression",
    "read_coefficients_csv",
    "residual_diagnostic",
    "simulate_cpp",
    "simulate_diffusion",
    "simulate_path",
    "subsample",
    "substream_seed",
    "write_coefficients_csv",
]
