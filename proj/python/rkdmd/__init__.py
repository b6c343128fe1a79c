"""Rate kernels of a dissipative two-level system and their DMD surrogate.

The heavy lifting lives in the compiled extension; this package re-exports
the pieces a script usually needs.
"""

from ._core import (
    AmplitudeMethod,
    BathExpansion,
    BathTerm,
    CapacityError,
    ConfigError,
    CouplingLabel,
    DmdModel,
    EtHamiltonian,
    HierarchySpace,
    KernelSeries,
    NumericalError,
    PopulationTrajectory,
    ProjectorKind,
    RankPolicy,
    SnapshotSet,
    SpectralDensity,
    SpectralKind,
    SpectrumSeries,
    TimeGrid,
    compare_files,
    correlation_expansion,
    eval_j,
    extract_kernel,
    fit_dmd,
    kernel_fft,
    markovian_weight_exact,
    propagate_populations,
    reconstruction_error,
    run_config,
    series_from_model,
    snapshots_from_series,
    solve_population_model,
    solve_population_series,
)

__all__ = [
    "AmplitudeMethod",
    "BathExpansion",
    "BathTerm",
    "CapacityError",
    "ConfigError",
    "CouplingLabel",
    "DmdModel",
    "EtHamiltonian",
    "HierarchySpace",
    "KernelSeries",
    "NumericalError",
    "PopulationTrajectory",
    "ProjectorKind",
    "RankPolicy",
    "SnapshotSet",
    "SpectralDensity",
    "SpectralKind",
    "SpectrumSeries",
    "TimeGrid",
    "compare_files",
    "correlation_expansion",
    "eval_j",
    "extract_kernel",
    "fit_dmd",
    "kernel_fft",
    "markovian_weight_exact",
    "propagate_populations",
    "reconstruction_error",
    "run_config",
    "series_from_model",
    "snapshots_from_series",
    "solve_population_model",
    "solve_population_series",
]
