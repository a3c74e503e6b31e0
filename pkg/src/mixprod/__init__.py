"""Identification of mixtures of binary product distributions from multilinear moments."""
from __future__ import annotations

__version__ = "0.1.0"

from .adversarial import (
    AdversarialPair,
    CertificateFailed,
    confusable_pair,
    lower_bound_instance,
    near_singular_model,
    vandermonde_inverse_norm_bound,
)
from .errors import (
    ComplexSpectrum,
    DegeneratePi,
    DimensionMismatch,
    EigenvalueCollision,
    EnumerationLimit,
    InfeasibleParameters,
    InvalidModel,
    MixprodError,
    NearSingular,
    NoViableCandidate,
    NonFiniteInput,
    NormalizationUnstable,
    PreconditionFailed,
    RankDeficient,
)
from .hadamard import (
    HadamardExtension,
    hadamard_extension,
    hadamard_product,
    kruskal_rank,
    rank_one_annihilator,
    sigma_k_cst_lower_bound,
    sigma_k_lower_bound,
    vandermonde,
)
from .identify import (
    Diagnostics,
    IdentificationResult,
    IdentifyOptions,
    candidate_partitions,
    count_candidates,
    default_partition,
    extend_to_all_observables,
    identify,
    identify_search,
)
from .kernels import BACKEND
from .linalg import eig_real, sigma_k, singular_values, solve, svd
from .model import (
    MixtureModel,
    ModelClassParams,
    MembershipReport,
    load_model,
    model_distance,
    random_model,
    save_model,
    stat_distance,
    validate_membership,
)
from .moments import (
    MomentVector,
    PairMatrices,
    SubsetPartition,
    assemble_pair_matrices,
    empirical_moments,
    exact_moments,
    load_moments,
    restrict_moments,
    save_moments,
)
from .sampler import SampleBatch, draw_samples, read_samples, write_samples
