"""Multi-run studies: balance-weight sweeps, epoch-budget grids, feature geometry."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..align.losses import FeaturePairing, PairwiseStats, pairwise_feature_stats
from ..augment.batches import ImageBatch
from ..augment.chains import AugChainSpec, chain_mix_image
from ..config import ExperimentConfig, replace_section
from ..engine.tensor import Tensor
from .loop import TrainResult, train_run
from .models import ModelSplit


@dataclass
class SweepRow:
    gamma: float
    seed: int
    sa: float
    ra: float


@dataclass
class BudgetRow:
    fraction: float
    epochs: int
    variant: str
    seed: int
    sa: float
    ra: float


def gamma_sweep(base: ExperimentConfig, gammas, seeds=None) -> list:
    """One run per (gamma, seed); gamma 0 reproduces the alignment-free baseline."""
    if seeds is None:
        seeds = [base.run.seed]
    rows = []
    for gamma in gammas:
        for seed in seeds:
            cfg = replace_section(base, "objective", gamma=float(gamma))
            cfg = replace_section(cfg, "run", seed=int(seed))
            result = train_run(cfg)
            rows.append(SweepRow(float(gamma), int(seed), result.final_sa, result.final_ra))
    return rows


def budget_epochs(total_epochs: int, fraction: float) -> int:
    """Floor of the fractional budget, but at least one epoch."""
    if not 0.0 < fraction <= 1.0:
        raise ValueError(f"fraction must lie in (0, 1], got {fraction}")
    return max(1, int(fraction * total_epochs))


def epoch_budget_study(base: ExperimentConfig, fractions, seeds=None) -> list:
    """Paired runs (configured variant vs none) at reduced epoch budgets, same seeds."""
    if seeds is None:
        seeds = [base.run.seed]
    rows = []
    for fraction in fractions:
        epochs = budget_epochs(base.run.epochs, fraction)
        for variant in (base.objective.variant, "none"):
            for seed in seeds:
                cfg = replace_section(base, "objective", variant=variant)
                cfg = replace_section(cfg, "run", epochs=epochs, seed=int(seed))
                result = train_run(cfg)
                rows.append(BudgetRow(float(fraction), epochs, variant, int(seed),
                                      result.final_sa, result.final_ra))
    return rows


def feature_geometry_stats(model: ModelSplit, batch: ImageBatch, spec: AugChainSpec,
                           seed: int = 0) -> PairwiseStats:
    """Clean-vs-augmented embedding distance stats on a fixed augmentation draw."""
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    aug = np.empty_like(batch.images)
    for i in range(len(batch)):
        aug[i] = chain_mix_image(batch.images[i], spec, rng)
    clean_feats = model.extractor(Tensor(batch.images))
    aug_feats = model.extractor(Tensor(aug))
    pairing = FeaturePairing.identity(clean_feats, aug_feats, batch.labels)
    return pairwise_feature_stats(pairing)


def median_metric(rows, metric: str, **filters) -> float:
    """Median of one metric over rows matching the given attribute filters."""
    values = [
        getattr(r, metric)
        for r in rows
        if all(getattr(r, k) == v for k, v in filters.items())
    ]
    if not values:
        raise ValueError(f"no rows match filters {filters}")
    return float(np.median(values))
