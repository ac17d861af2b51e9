"""Low-rank completion of multidimensional time series with non-random
missing entries, via temporal delay-embedding and the t-SVD algebra."""

from .t_algebra import (
    TransformSpec,
    TSvdFactors,
    transform_forward,
    transform_inverse,
    t_product,
    t_transpose,
    identity_tensor,
    t_svd,
    tsvd_rank,
    multi_rank,
    multi_rank_sum,
    tnn,
    spectral_norm,
    t_svt,
)
from .hankel import (
    HankelConfig,
    BoundCheck,
    hankel_forward,
    hankel_inverse,
    smoothness,
    periodicity,
    rank_error,
    check_smoothness_bound,
    check_periodicity_bound,
)
from .sampling import (
    SamplingMask,
    TheoryDiagnostics,
    apply_mask,
    hankel_mask,
    min_temporal_sampling_rate,
    gen_pattern,
    gen_bernoulli,
    gen_prediction,
    incoherence_mu,
    theory_bound,
)
from .solver import SolverConfig, RecoveryReport, admm_solve, objective
from .experiments import (
    PhaseGridSpec,
    ExperimentRecord,
    generate_synthetic,
    mae,
    rmse,
    add_noise,
    run_phase_transition,
    run_scaling_bench,
)

__version__ = "0.1.0"
