from .losses import (
    FeaturePairing,
    MarginConfig,
    PairwiseStats,
    csa_loss,
    feature_shuffle,
    fisher_yates_permutation,
    pairwise_feature_stats,
    semantic_alignment_loss,
    separation_loss,
    supcon_loss,
)

__all__ = [
    "FeaturePairing", "MarginConfig", "PairwiseStats",
    "csa_loss", "feature_shuffle", "fisher_yates_permutation",
    "pairwise_feature_stats", "semantic_alignment_loss", "separation_loss",
    "supcon_loss",
]
