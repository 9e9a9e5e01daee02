"""Contrastive semantic alignment losses and feature shuffling.

A ``FeaturePairing`` matches clean embedding i with augmented embedding
``permutation[i]``. Same-label pairs feed the alignment term (pull together),
different-label pairs feed the separation term (push beyond the margin); the
shuffle is what creates different-label pairs in the first place, since
augmentation itself never changes a label.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from ..engine.tensor import Tensor


@dataclass
class MarginConfig:
    """Hinge margin for the separation term (desired minimum distance)."""

    margin: float = 1.0

    def __post_init__(self):
        if self.margin <= 0:
            raise ValueError(f"margin must be > 0, got {self.margin}")


@dataclass
class FeaturePairing:
    """Clean/augmented embedding batch plus the pairing permutation.

    ``clean_features[i]`` is paired with ``aug_features[permutation[i]]`` and
    the pair's labels are ``labels_clean[i]`` / ``labels_aug[permutation[i]]``.
    """

    clean_features: Tensor
    aug_features: Tensor
    labels_clean: np.ndarray
    labels_aug: np.ndarray
    permutation: np.ndarray

    def __post_init__(self):
        self.labels_clean = np.asarray(self.labels_clean)
        self.labels_aug = np.asarray(self.labels_aug)
        self.permutation = np.asarray(self.permutation, dtype=np.intp)
        b, z = self.clean_features.shape
        if self.aug_features.shape[1] != z:
            raise ValueError(
                f"embedding widths differ: clean {z}, augmented {self.aug_features.shape[1]}"
            )
        if self.aug_features.shape[0] != b:
            raise ValueError(
                f"batch sizes differ: clean {b}, augmented {self.aug_features.shape[0]}"
            )
        if self.labels_clean.shape != (b,) or self.labels_aug.shape != (b,):
            raise ValueError("label arrays must be 1-D and match the batch size")
        if self.permutation.shape != (b,) or not np.array_equal(
            np.sort(self.permutation), np.arange(b)
        ):
            raise ValueError("permutation must be a bijection on the batch indices")

    @classmethod
    def identity(cls, clean_features, aug_features, labels_clean, labels_aug=None):
        labels_clean = np.asarray(labels_clean)
        if labels_aug is None:
            labels_aug = labels_clean.copy()
        b = clean_features.shape[0]
        return cls(clean_features, aug_features, labels_clean, labels_aug, np.arange(b))

    @property
    def is_identity(self) -> bool:
        return bool(np.array_equal(self.permutation, np.arange(len(self.permutation))))

    def paired_label_match(self) -> np.ndarray:
        """Boolean mask: pair i has matching labels."""
        return self.labels_clean == self.labels_aug[self.permutation]


def _pair_squared_distances(pairing: FeaturePairing) -> Tensor:
    diff = pairing.clean_features - pairing.aug_features.take_rows(pairing.permutation)
    return (diff * diff).sum(axis=1)


def semantic_alignment_loss(pairing: FeaturePairing) -> Tensor:
    """Mean over same-label pairs of half the squared embedding distance."""
    mask = pairing.paired_label_match()
    count = int(mask.sum())
    if count == 0:
        return Tensor(0.0)
    sq = _pair_squared_distances(pairing)
    return (sq * mask.astype(np.float64)).sum() * (0.5 / count)


def separation_loss(pairing: FeaturePairing, cfg: MarginConfig) -> Tensor:
    """Mean over different-label pairs of half the squared hinge max(0, m - distance)."""
    mask = ~pairing.paired_label_match()
    count = int(mask.sum())
    if count == 0:
        return Tensor(0.0)
    dist = _pair_squared_distances(pairing).sqrt()
    hinge = (cfg.margin - dist).relu()
    return (hinge * hinge * mask.astype(np.float64)).sum() * (0.5 / count)


def csa_loss(pairing: FeaturePairing, cfg: MarginConfig) -> Tensor:
    """Alignment plus separation; every pair lands in exactly one term by label equality."""
    return semantic_alignment_loss(pairing) + separation_loss(pairing, cfg)


def fisher_yates_permutation(n: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform permutation drawn with one rng.integers call per swap."""
    perm = np.arange(n)
    for i in range(n - 1, 0, -1):
        j = int(rng.integers(0, i + 1))
        perm[i], perm[j] = perm[j], perm[i]
    return perm


def feature_shuffle(pairing: FeaturePairing, rng: np.random.Generator) -> FeaturePairing:
    """Re-pair by a uniform random permutation of the augmented side.

    Features and labels travel together, so label bookkeeping stays
    consistent; the clean side is untouched. Requires an identity pairing.
    """
    if not pairing.is_identity:
        raise ValueError("feature_shuffle expects an identity pairing (not yet shuffled)")
    perm = fisher_yates_permutation(len(pairing.permutation), rng)
    return FeaturePairing(
        pairing.clean_features,
        pairing.aug_features,
        pairing.labels_clean,
        pairing.labels_aug,
        perm,
    )


def supcon_loss(features: Tensor, labels, temperature: float = 0.1) -> Tensor:
    """Supervised contrastive loss on L2-normalized features.

    Per anchor: mean over same-label positives of -log softmax similarity,
    with the anchor excluded from its own denominator. Anchors without a
    positive are skipped; if none has one, returns zero and warns.
    """
    labels = np.asarray(labels)
    b = features.shape[0]
    if b < 2:
        raise ValueError(f"supcon_loss needs a batch of at least 2, got {b}")
    if temperature <= 0:
        raise ValueError(f"temperature must be > 0, got {temperature}")

    pos_mask = (labels[:, None] == labels[None, :]) & ~np.eye(b, dtype=bool)
    pos_counts = pos_mask.sum(axis=1)
    valid = pos_counts > 0
    n_valid = int(valid.sum())
    if n_valid == 0:
        warnings.warn("supcon_loss: no anchor has a same-label positive; returning 0")
        return Tensor(0.0)

    norms = (features * features).sum(axis=1, keepdims=True).sqrt()
    normalized = features / norms
    sim = (normalized @ normalized.transpose()) * (1.0 / temperature)
    masked = sim + (-1e9) * np.eye(b)

    row_max = masked.data.max(axis=1, keepdims=True)  # constant shift
    lse = ((masked - row_max).exp().sum(axis=1, keepdims=True)).log() + row_max

    inv_counts = np.where(valid, 1.0 / np.maximum(pos_counts, 1), 0.0)
    mean_pos_sim = (sim * pos_mask.astype(np.float64)).sum(axis=1, keepdims=True) * inv_counts[:, None]
    per_anchor = (lse - mean_pos_sim) * valid.astype(np.float64)[:, None]
    return per_anchor.sum() * (1.0 / n_valid)


@dataclass
class PairwiseStats:
    mean_same_label_distance: float
    mean_diff_label_distance: float
    same_pairs: int
    diff_pairs: int


def pairwise_feature_stats(pairing: FeaturePairing) -> PairwiseStats:
    """Mean clean/augmented distances over all B^2 cross pairs, split by label equality."""
    a = pairing.clean_features.data
    b = pairing.aug_features.data
    dists = np.sqrt(((a[:, None, :] - b[None, :, :]) ** 2).sum(axis=2))
    same = pairing.labels_clean[:, None] == pairing.labels_aug[None, :]
    n_same = int(same.sum())
    n_diff = int((~same).sum())
    mean_same = float(dists[same].mean()) if n_same else float("nan")
    mean_diff = float(dists[~same].mean()) if n_diff else float("nan")
    return PairwiseStats(mean_same, mean_diff, n_same, n_diff)
