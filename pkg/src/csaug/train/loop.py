"""Training loop, accuracy evaluation, and robust-accuracy evaluation."""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from ..augment.batches import ImageBatch
from ..augment.chains import AugChainSpec, augmix_views
from ..augment.corruption import CORRUPTION_KINDS, CorruptionSpec, corrupt, full_suite
from ..augment.mixing import cutmix, mixup
from ..align.losses import MarginConfig
from ..config import ExperimentConfig
from ..data import load_idx_dataset, make_synthetic
from ..engine.optim import SGD, Adam, cosine_anneal_lr, step_decay_lr
from ..engine.tensor import Tensor, softmax_cross_entropy
from .models import ModelSplit, build_cnn, build_mlp
from .objectives import (
    LossComponents,
    ObjectiveConfig,
    consistency_total_loss,
    mixing_total_loss,
)


class NaNLossError(RuntimeError):
    """Raised when a training loss goes non-finite; carries the component dump."""

    def __init__(self, epoch: int, step: int, components: LossComponents):
        self.components = components
        super().__init__(
            f"non-finite loss at epoch {epoch} step {step}: "
            f"task={components.task:.6g} jsd={components.jsd:.6g} "
            f"sa={components.sa:.6g} sep={components.sep:.6g} supcon={components.supcon:.6g}"
        )


@dataclass
class EpochMetrics:
    epoch: int
    loss_task: float
    loss_sa: float
    loss_s: float
    loss_jsd: float
    sa: float | None = None
    ra: float | None = None
    per_corruption: dict | None = None
    seconds: float = 0.0


@dataclass
class TrainResult:
    config: ExperimentConfig
    metrics: list
    model: ModelSplit
    train_data: ImageBatch
    test_data: ImageBatch

    @property
    def final_sa(self) -> float | None:
        return self.metrics[-1].sa if self.metrics else None

    @property
    def final_ra(self) -> float | None:
        return self.metrics[-1].ra if self.metrics else None


def load_dataset(config: ExperimentConfig):
    ds = config.dataset
    if ds.kind == "idx":
        train = load_idx_dataset(
            f"{ds.idx_dir}/train-images.idx", f"{ds.idx_dir}/train-labels.idx", ds.limit
        )
        test = load_idx_dataset(
            f"{ds.idx_dir}/test-images.idx", f"{ds.idx_dir}/test-labels.idx", ds.limit
        )
        return train, test
    return make_synthetic(
        ds.kind, ds.n_train, ds.classes, ds.noise, config.run.seed,
        n_test=ds.n_test, image_size=ds.image_size,
    )


def build_model(config: ExperimentConfig, input_shape, classes: int,
                rng: np.random.Generator) -> ModelSplit:
    if config.model.kind == "mlp":
        return build_mlp(input_shape, config.hidden_widths(), config.model.embed_dim, classes, rng)
    return build_cnn(input_shape, config.channel_widths(), config.model.embed_dim, classes, rng)


def make_objective(config: ExperimentConfig) -> ObjectiveConfig:
    return ObjectiveConfig(
        mode=config.objective_mode,
        variant=config.objective.variant,
        gamma=config.objective.gamma,
        lambda_jsd=config.objective.lambda_jsd,
        margin=MarginConfig(config.objective.margin),
        supcon_temperature=config.objective.supcon_temperature,
    )


def make_chain_spec(config: ExperimentConfig) -> AugChainSpec:
    a = config.augment
    return AugChainSpec(
        pool=config.pool_kinds(), width=a.width, depth=a.depth,
        dirichlet_alpha=a.dirichlet, beta_alpha=a.beta, magnitude_cap=a.magnitude_cap,
    )


def make_optimizer(config: ExperimentConfig, model: ModelSplit):
    opt = config.optimizer
    if opt.kind == "adam":
        return Adam(model.named_parameters(), lr=opt.lr, betas=(opt.beta1, opt.beta2),
                    eps=opt.eps, weight_decay=opt.weight_decay)
    return SGD(model.named_parameters(), lr=opt.lr, momentum=opt.momentum,
               weight_decay=opt.weight_decay)


def lr_for_epoch(config: ExperimentConfig, epoch: int) -> float:
    sched = config.schedule
    base = config.optimizer.lr
    if sched.kind == "cosine":
        return cosine_anneal_lr(base, epoch, config.run.epochs)
    if sched.kind == "step":
        return step_decay_lr(base, epoch, sched.period, sched.factor)
    return base


def _step_loss(model, batch: ImageBatch, config, objective, chain_spec,
               rng_aug, rng_shuffle):
    mode = objective.mode
    if mode == "normal":
        _, logits = model.forward(Tensor(batch.images))
        loss = softmax_cross_entropy(logits, batch.labels)
        comps = LossComponents(mode, objective.variant, objective.gamma, objective.lambda_jsd,
                               task=loss.item())
        return loss, comps
    if mode == "mixing":
        aug = mixup if config.augment.mode == "mixup" else cutmix
        mixed = aug(batch, config.augment.alpha, rng_aug)
        return mixing_total_loss(model, mixed, batch, objective, rng_shuffle)
    views = augmix_views(batch, chain_spec, rng_aug)
    return consistency_total_loss(model, views, objective, rng_shuffle)


def train_run(config: ExperimentConfig, dataset=None, verbose: bool = False) -> TrainResult:
    """Run one training job to completion; deterministic given the config.

    ``dataset`` may supply a pre-built (train, test) pair, e.g. to share data
    across sweep runs; otherwise it is generated from the config.
    """
    config.validate()
    train_data, test_data = dataset if dataset is not None else load_dataset(config)
    ss = np.random.SeedSequence(config.run.seed)
    ss_init, ss_order, ss_aug, ss_shuffle = ss.spawn(4)
    rng_init = np.random.Generator(np.random.PCG64(ss_init))
    rng_order = np.random.Generator(np.random.PCG64(ss_order))
    rng_aug = np.random.Generator(np.random.PCG64(ss_aug))
    rng_shuffle = np.random.Generator(np.random.PCG64(ss_shuffle))

    classes = int(max(train_data.labels.max(), test_data.labels.max())) + 1
    input_shape = train_data.images.shape[1:]
    model = build_model(config, input_shape, classes, rng_init)
    objective = make_objective(config)
    chain_spec = make_chain_spec(config) if objective.mode == "consistency" else None
    optimizer = make_optimizer(config, model)

    n = len(train_data)
    batch_size = config.run.batch_size
    epochs = config.run.epochs
    metrics: list = []

    for epoch in range(epochs):
        start = time.perf_counter()
        optimizer.lr = lr_for_epoch(config, epoch)
        order = rng_order.permutation(n)
        sums = np.zeros(4)
        steps = 0
        for lo in range(0, n, batch_size):
            batch = train_data.subset(order[lo:lo + batch_size])
            loss, comps = _step_loss(model, batch, config, objective, chain_spec,
                                     rng_aug, rng_shuffle)
            if not np.isfinite(loss.data):
                raise NaNLossError(epoch, steps, comps)
            loss.backward()
            optimizer.step()
            model.zero_grad()
            sums += (comps.task, comps.sa, comps.sep, comps.jsd)
            steps += 1
        row = EpochMetrics(epoch, *(sums / max(steps, 1)))
        is_last = epoch == epochs - 1
        if is_last or (config.run.eval_every > 0 and (epoch + 1) % config.run.eval_every == 0):
            row.sa = evaluate_sa(model, test_data)
            row.ra, row.per_corruption = evaluate_ra(
                model, test_data, full_suite(), config.run.eval_seed
            )
        row.seconds = time.perf_counter() - start
        metrics.append(row)
        if verbose:
            sa = f"{row.sa:.4f}" if row.sa is not None else "-"
            ra = f"{row.ra:.4f}" if row.ra is not None else "-"
            print(f"epoch {epoch:3d} task {row.loss_task:.4f} sa {sa} ra {ra}")

    return TrainResult(config, metrics, model, train_data, test_data)


def evaluate_sa(model: ModelSplit, test: ImageBatch, chunk: int = 512) -> float:
    """Top-1 accuracy on clean data."""
    if len(test) == 0:
        raise ValueError("evaluate_sa requires a non-empty test set")
    correct = 0
    for lo in range(0, len(test), chunk):
        pred = model.predict(test.images[lo:lo + chunk])
        correct += int((pred == test.labels[lo:lo + chunk]).sum())
    return correct / len(test)


def _cell_rng(eval_seed: int, spec: CorruptionSpec) -> np.random.Generator:
    key = (CORRUPTION_KINDS.index(spec.kind), spec.severity)
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(eval_seed, spawn_key=key)))


def evaluate_ra(model: ModelSplit, test: ImageBatch, suite, eval_seed: int):
    """Mean top-1 accuracy over corruption cells, plus the per-cell table.

    Each (kind, severity) cell corrupts with its own generator derived from
    ``eval_seed``, so results do not depend on evaluation order.
    """
    if not suite:
        raise ValueError("evaluate_ra requires a non-empty corruption suite")
    table = {}
    for spec in suite:
        corrupted = corrupt(test, spec, _cell_rng(eval_seed, spec))
        table[(spec.kind, spec.severity)] = evaluate_sa(model, corrupted)
    ra = float(np.mean(list(table.values())))
    return ra, table
