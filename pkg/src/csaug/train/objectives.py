"""Composite training objectives: mixing and consistency modes, with optional
alignment terms (full contrastive, alignment-only ablation, or SupCon baseline).

The alignment weight gamma blends convexly: total = (1-gamma) * task objective
+ gamma * alignment objective. With gamma = 0 or the alignment variant off,
the task objective is returned on the same graph, untouched, so baselines are
bit-identical to alignment-free training.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..align.losses import (
    FeaturePairing,
    MarginConfig,
    csa_loss,
    feature_shuffle,
    semantic_alignment_loss,
    separation_loss,
    supcon_loss,
)
from ..augment.batches import ConsistencyBatch, ImageBatch, MixedBatch
from ..engine.tensor import Tensor, concat_rows, softmax, softmax_cross_entropy
from .models import ModelSplit

MODES = ("normal", "mixing", "consistency")
VARIANTS = ("none", "csa", "sa-only", "supcon")


@dataclass
class ObjectiveConfig:
    mode: str = "normal"
    variant: str = "none"
    gamma: float = 0.25
    lambda_jsd: float = 12.0
    margin: MarginConfig = field(default_factory=MarginConfig)
    supcon_temperature: float = 0.1

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got '{self.mode}'")
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got '{self.variant}'")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError(f"gamma must lie in [0, 1], got {self.gamma}")
        if self.lambda_jsd < 0:
            raise ValueError(f"lambda_jsd must be >= 0, got {self.lambda_jsd}")
        if self.mode == "normal" and self.variant != "none":
            raise ValueError("alignment variants need augmented views; mode 'normal' has none")

    @property
    def alignment_active(self) -> bool:
        return self.variant != "none" and self.gamma > 0.0


@dataclass
class LossComponents:
    """Scalar values of each objective term, for logging and recombination checks."""

    mode: str
    variant: str
    gamma: float
    lambda_jsd: float
    task: float = 0.0
    jsd: float = 0.0
    sa: float = 0.0
    sep: float = 0.0
    supcon: float = 0.0
    permutations: tuple = ()

    def recombined(self) -> float:
        task_obj = self.task + self.lambda_jsd * self.jsd if self.mode == "consistency" else self.task
        if self.variant == "none" or self.gamma == 0.0:
            return task_obj
        if self.variant == "supcon":
            align = self.supcon
        else:
            align = self.sa + self.sep
        return (1.0 - self.gamma) * task_obj + self.gamma * align


def mixing_task_loss(model: ModelSplit, mixed: MixedBatch) -> Tensor:
    """Dual cross-entropy weighted by the mixing ratio."""
    _, loss = _mixing_forward(model, mixed)
    return loss


def _mixing_forward(model: ModelSplit, mixed: MixedBatch):
    feats, logits = model.forward(Tensor(mixed.mixed_images))
    ce_a = softmax_cross_entropy(logits, mixed.labels_a)
    lam = mixed.lambda_m
    if lam == 1.0:
        return feats, ce_a
    ce_b = softmax_cross_entropy(logits, mixed.labels_b)
    if lam == 0.0:
        return feats, ce_b
    return feats, lam * ce_a + (1.0 - lam) * ce_b


def _alignment_term(clean_feats, aug_feats, labels_clean, labels_aug, cfg: ObjectiveConfig,
                    rng: np.random.Generator, components: LossComponents):
    """One pairing's alignment contribution under the active variant (csa or sa-only)."""
    pairing = FeaturePairing.identity(clean_feats, aug_feats, labels_clean, labels_aug)
    if cfg.variant == "csa":
        pairing = feature_shuffle(pairing, rng)
        components.permutations += (pairing.permutation,)
        sa = semantic_alignment_loss(pairing)
        sep = separation_loss(pairing, cfg.margin)
        return sa, sep
    # sa-only ablation: no shuffle, alignment term alone
    components.permutations += (pairing.permutation,)
    return semantic_alignment_loss(pairing), None


def mixing_total_loss(model: ModelSplit, mixed: MixedBatch, clean: ImageBatch,
                      cfg: ObjectiveConfig, rng: np.random.Generator):
    """Mixing-mode objective: (1-gamma) * dual-CE + gamma * alignment.

    The alignment pairing uses the embedding of the mixed images (same forward
    as the task term) against a clean forward, labeled with the primary
    (un-permuted) mixing labels on the augmented side.
    """
    if cfg.mode != "mixing":
        raise ValueError(f"mixing_total_loss requires mode 'mixing', got '{cfg.mode}'")
    if not np.array_equal(mixed.labels_a, clean.labels):
        raise ValueError("mixed batch labels_a must be the clean batch labels")
    components = LossComponents(cfg.mode, cfg.variant, cfg.gamma, cfg.lambda_jsd)
    mixed_feats, task = _mixing_forward(model, mixed)
    components.task = task.item()
    if not cfg.alignment_active:
        return task, components

    clean_feats = model.extractor(Tensor(clean.images))
    if cfg.variant == "supcon":
        feats = concat_rows([clean_feats, mixed_feats])
        labels = np.concatenate([clean.labels, mixed.labels_a])
        align = supcon_loss(feats, labels, cfg.supcon_temperature)
        components.supcon = align.item()
    else:
        sa, sep = _alignment_term(clean_feats, mixed_feats, clean.labels, mixed.labels_a,
                                  cfg, rng, components)
        components.sa = sa.item()
        if sep is None:
            align = sa
        else:
            components.sep = sep.item()
            align = sa + sep
    total = (1.0 - cfg.gamma) * task + cfg.gamma * align
    return total, components


def jsd_consistency(p_clean: Tensor, p_aug1: Tensor, p_aug2: Tensor,
                    reduction: str = "mean") -> Tensor:
    """Jensen-Shannon divergence of three prediction distributions.

    Probabilities are floored at 1e-12 before the logarithms so saturated
    softmax outputs stay finite. ``reduction="none"`` returns per-row values.
    """
    for name, p in (("p_clean", p_clean), ("p_aug1", p_aug1), ("p_aug2", p_aug2)):
        row_sums = p.data.sum(axis=1)
        if np.abs(row_sums - 1.0).max() > 1e-5:
            raise ValueError(f"{name} rows must sum to 1 within 1e-5")
    floor = 1e-12
    m = (p_clean + p_aug1 + p_aug2) * (1.0 / 3.0)
    log_m = m.clip_min(floor).log()

    def kl(p):
        return (p * (p.clip_min(floor).log() - log_m)).sum(axis=1)

    rows = (kl(p_clean) + kl(p_aug1) + kl(p_aug2)) * (1.0 / 3.0)
    if reduction == "none":
        return rows
    return rows.mean()


def consistency_total_loss(model: ModelSplit, batch: ConsistencyBatch,
                           cfg: ObjectiveConfig, rng: np.random.Generator):
    """Consistency-mode objective: (1-gamma) * (CE + lambda * JSD) + gamma * alignment.

    The clean forward is shared by the cross-entropy, the divergence, and the
    alignment pairings; each augmented view gets its own independently
    shuffled pairing and the two contributions are averaged.
    """
    if cfg.mode != "consistency":
        raise ValueError(f"consistency_total_loss requires mode 'consistency', got '{cfg.mode}'")
    components = LossComponents(cfg.mode, cfg.variant, cfg.gamma, cfg.lambda_jsd)
    labels = batch.clean.labels
    clean_feats, clean_logits = model.forward(Tensor(batch.clean.images))
    feats1, logits1 = model.forward(Tensor(batch.aug1))
    feats2, logits2 = model.forward(Tensor(batch.aug2))

    ce = softmax_cross_entropy(clean_logits, labels)
    jsd = jsd_consistency(softmax(clean_logits), softmax(logits1), softmax(logits2))
    components.task = ce.item()
    components.jsd = jsd.item()
    task_obj = ce + cfg.lambda_jsd * jsd
    if not cfg.alignment_active:
        return task_obj, components

    if cfg.variant == "supcon":
        feats = concat_rows([clean_feats, feats1, feats2])
        align = supcon_loss(feats, np.tile(labels, 3), cfg.supcon_temperature)
        components.supcon = align.item()
        total = (1.0 - cfg.gamma) * task_obj + cfg.gamma * align
        return total, components

    terms = []
    for aug_feats in (feats1, feats2):
        sa, sep = _alignment_term(clean_feats, aug_feats, labels, labels.copy(),
                                  cfg, rng, components)
        components.sa += 0.5 * sa.item()
        if sep is None:
            terms.append(sa)
        else:
            components.sep += 0.5 * sep.item()
            terms.append(sa + sep)
    total = (1.0 - cfg.gamma) * task_obj + (cfg.gamma * 0.5) * (terms[0] + terms[1])
    return total, components
