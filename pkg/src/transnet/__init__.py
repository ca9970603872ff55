"""Transfer learning of community structure from privatised, locally stored source networks."""
from .clustering import cluster_kmeans
from .federation import SourceSummary, decode, encode, local_site_compute
from .netgen import (
    BinaryNetwork,
    ExperimentConfig,
    SbmSpec,
    Scenario,
    build_scenario,
    generate_sbm,
    perturb_membership,
)
from .pipeline import (
    PipelineConfig,
    PipelineResult,
    baseline_distributed_sc,
    baseline_single_sc,
    regularize,
    run_transnet,
    select_lambda_cv,
    step1_aggregate,
)
from .privacy import DebiasedNetwork, PrivacyParams, debias, epsilon_to_q, q_to_epsilon, randomized_response
from .spectral import (
    Eigenspace,
    ground_truth_eigenspace,
    procrustes_align,
    projection_distance,
    top_k_eigvecs,
    weighted_aggregate,
)
from .weighting import (
    SourceStats,
    adaptive_weights_practical,
    adaptive_weights_theoretical,
    equal_weights,
    estimate_density,
    estimate_heterogeneity,
)

__version__ = "0.1.0"

__all__ = [
    "cluster_kmeans",
    "SourceSummary",
    "decode",
    "encode",
    "local_site_compute",
    "BinaryNetwork",
    "ExperimentConfig",
    "SbmSpec",
    "Scenario",
    "build_scenario",
    "generate_sbm",
    "perturb_membership",
    "PipelineConfig",
    "PipelineResult",
    "baseline_distributed_sc",
    "baseline_single_sc",
    "regularize",
    "run_transnet",
    "select_lambda_cv",
    "step1_aggregate",
    "DebiasedNetwork",
    "PrivacyParams",
    "debias",
    "epsilon_to_q",
    "q_to_epsilon",
    "randomized_response",
    "Eigenspace",
    "ground_truth_eigenspace",
    "procrustes_align",
    "projection_distance",
    "top_k_eigvecs",
    "weighted_aggregate",
    "SourceStats",
    "adaptive_weights_practical",
    "adaptive_weights_theoretical",
    "equal_weights",
    "estimate_density",
    "estimate_heterogeneity",
]
