"""Uncertainty-product benchmark toolkit for continuous-variable channels.

Computes and simulates the averaged quadrature noises of one-mode channels
driven by Gaussian-distributed coherent states, and decides whether a channel
beats the noise trade-off achievable by any entanglement-breaking channel.
"""

from .states import (
    GaussianState,
    PhasePoint,
    V0,
    check_physical,
    coherent_state,
    heterodyne_distribution,
    make_gaussian,
    quadrature_marginal,
    quadrature_means,
    squeezed_coherent_state,
    symplectic_eigenvalues,
    two_mode_squeezed_state,
)
from .channels import (
    GaussianChannelSpec,
    MeasurePrepareSpec,
    apply_gaussian_channel,
    choi_state,
    classify_gaussian_channel,
    is_completely_positive,
    is_entanglement_breaking,
    mp_from_benchmark,
    mp_noise_closed_form,
    mp_transcript,
)
from .benchmark import (
    BenchmarkParams,
    BoundVerdict,
    HybridTestParams,
    NoiseReport,
    average_fidelity_gaussian,
    average_noise,
    average_noise_gaussian,
    average_noise_mp,
    boundary_curve,
    evaluate_bounds,
    fidelity_lower_bound,
    find_violation,
    hybrid_lhs,
    params_from_hybrid,
    product_bound,
    sum_bound,
)
from .montecarlo import (
    CertifiedVerdict,
    Estimate,
    ExperimentConfig,
    certify,
    kernel_backend,
    run_experiment,
    sample_prior,
)

__version__ = "0.1.0"

__all__ = [
    "BenchmarkParams",
    "BoundVerdict",
    "CertifiedVerdict",
    "Estimate",
    "ExperimentConfig",
    "GaussianChannelSpec",
    "GaussianState",
    "HybridTestParams",
    "MeasurePrepareSpec",
    "NoiseReport",
    "PhasePoint",
    "V0",
    "apply_gaussian_channel",
    "average_fidelity_gaussian",
    "average_noise",
    "average_noise_gaussian",
    "average_noise_mp",
    "boundary_curve",
    "certify",
    "check_physical",
    "choi_state",
    "classify_gaussian_channel",
    "coherent_state",
    "evaluate_bounds",
    "fidelity_lower_bound",
    "find_violation",
    "heterodyne_distribution",
    "hybrid_lhs",
    "is_completely_positive",
    "is_entanglement_breaking",
    "kernel_backend",
    "make_gaussian",
    "mp_from_benchmark",
    "mp_noise_closed_form",
    "mp_transcript",
    "params_from_hybrid",
    "product_bound",
    "quadrature_marginal",
    "quadrature_means",
    "run_experiment",
    "sample_prior",
    "squeezed_coherent_state",
    "sum_bound",
    "symplectic_eigenvalues",
    "two_mode_squeezed_state",
    "__version__",
]
