"""Unsupervised cross-network user identity linkage via factoid embeddings."""

from .embeddings import EmbeddingTable, load_embeddings, save_embeddings, save_user_embeddings
from .evaluation import (
    Metrics,
    RankingResult,
    compute_metrics,
    link_networks,
    name_baseline,
    rank_targets,
)
from .exceptions import DivergenceError, FactoidLinkError, InputError
from .factoid_embedding import (
    FactoidTrainConfig,
    NoiseDistribution,
    ProjectionParams,
    project,
    sample_negative,
    score_user_object,
    score_user_user,
    sgd_step_user_object,
    sgd_step_user_user,
    train,
)
from .network import AttributeObject, SocialNetwork, UserRecord, load_network, write_network
from .object_embedding import ObjectTrainConfig, embed_objects, reconstruction_error
from .pipeline import PipelineConfig, run_pipeline
from .similarity import (
    SparseSimilarityMatrix,
    build_similarity_matrix,
    cosine_similarity,
    jaro_winkler,
    lsh_candidate_pairs,
    trigram_candidate_pairs,
)
from .synthetic import generate_synthetic_pair, twin_name_instance
from .unified import (
    FOLLOWS,
    Factoid,
    UnifiedNetwork,
    build_unified_network,
    merge_anchor_pairs,
)

__version__ = "0.1.0"

__all__ = [
    "AttributeObject",
    "DivergenceError",
    "EmbeddingTable",
    "Factoid",
    "FactoidLinkError",
    "FactoidTrainConfig",
    "FOLLOWS",
    "InputError",
    "Metrics",
    "NoiseDistribution",
    "ObjectTrainConfig",
    "PipelineConfig",
    "ProjectionParams",
    "RankingResult",
    "SocialNetwork",
    "SparseSimilarityMatrix",
    "UnifiedNetwork",
    "UserRecord",
    "build_similarity_matrix",
    "build_unified_network",
    "compute_metrics",
    "cosine_similarity",
    "embed_objects",
    "generate_synthetic_pair",
    "jaro_winkler",
    "link_networks",
    "load_embeddings",
    "load_network",
    "lsh_candidate_pairs",
    "merge_anchor_pairs",
    "name_baseline",
    "project",
    "rank_targets",
    "reconstruction_error",
    "run_pipeline",
    "sample_negative",
    "save_embeddings",
    "save_user_embeddings",
    "score_user_object",
    "score_user_user",
    "sgd_step_user_object",
    "sgd_step_user_user",
    "train",
    "trigram_candidate_pairs",
    "twin_name_instance",
    "write_network",
]
