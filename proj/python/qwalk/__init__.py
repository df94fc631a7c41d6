"""Coined quantum and classical random walks on congested lattices."""

from ._core import (
    RNG_ALGORITHM,
    CapacityError,
    ConfigError,
    EnsembleResult,
    ExperimentConfig,
    LatticeMode,
    PreconditionError,
    QwalkError,
    ValidationError,
    __version__,
    classical_distributions,
    density_evolution,
    dephase_channel,
    dephase_mixture_exhaustive,
    evolve,
    lattice,
    measurement_equivalent_rate,
    preset,
    run,
    sweep,
    variance,
)

__all__ = [name for name in dir() if not name.startswith("_")]
