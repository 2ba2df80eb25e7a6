"""Multipartite CV entanglement distillation with local squeezing and one photon subtraction."""

from .conditioning import (
    DistillOutcome,
    Partition,
    SignedGaussianMixture,
    condition_on_vacuum,
    loss_channel,
    partition_mode,
    photon_subtract_many,
    photon_subtract_one,
)
from .entanglement import Bipartition, gaussian_log_negativity, log_negativity, partial_transpose
from .errors import CapacityError, CVDistillError, InvalidArgument, InvalidState
from .experiments import (
    PipelineConfig,
    PipelineResult,
    baseline_study,
    n_scaling_study,
    optimize_s,
    run_pipeline,
    sweep_s,
)
from .fock import FockDensityMatrix, build_kernel, gaussian_to_fock, mixture_to_fock, truncation_deficit
from .gaussian import (
    StateFamilyParams,
    apply_symplectic,
    beamsplitter,
    purity,
    squeezer,
    symmetric_state,
    symplectic_eigenvalues,
    tensor_with_vacuum,
    unbiased_r1,
    vacuum,
)

__version__ = "0.1.0"
