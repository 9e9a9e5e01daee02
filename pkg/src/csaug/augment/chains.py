"""Chain-mixing augmentation producing paired views for consistency training.

Each view blends the clean image with a Dirichlet-weighted sum of short
random transform chains; the clean/mixture blend weight is a Beta draw.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .batches import ConsistencyBatch, ImageBatch
from .primitives import PRIMITIVE_KINDS, primitive_transform

DEFAULT_POOL = (
    "translate-x",
    "translate-y",
    "flip-horizontal",
    "rotate90",
    "posterize-quantize",
    "contrast-scale",
    "brightness-shift",
)


@dataclass
class AugChainSpec:
    """Sampling parameters for chain-mix views.

    ``magnitude_cap`` bounds sampled primitive magnitudes; small caps keep
    transforms mild enough to preserve labels on position-coded data.
    """

    pool: tuple = DEFAULT_POOL
    width: int = 3
    depth: int = 3
    dirichlet_alpha: float = 1.0
    beta_alpha: float = 1.0
    magnitude_cap: float = 1.0

    def __post_init__(self):
        self.pool = tuple(self.pool)
        if not self.pool:
            raise ValueError("operation pool must not be empty")
        unknown = [k for k in self.pool if k not in PRIMITIVE_KINDS]
        if unknown:
            raise ValueError(f"unknown primitive kinds in pool: {unknown}")
        if self.width < 1 or self.depth < 1:
            raise ValueError("chain width and depth must be >= 1")
        if self.dirichlet_alpha <= 0 or self.beta_alpha <= 0:
            raise ValueError("concentration parameters must be > 0")
        if not 0.0 < self.magnitude_cap <= 1.0:
            raise ValueError(f"magnitude_cap must lie in (0, 1], got {self.magnitude_cap}")


def compose_chain(image: np.ndarray, ops) -> np.ndarray:
    """Apply a list of (kind, magnitude) transforms in order."""
    out = image
    for kind, magnitude in ops:
        out = primitive_transform(out, kind, magnitude)
    return out


def mix_chains(clean: np.ndarray, chain_images, weights, blend: float) -> np.ndarray:
    """blend * clean + (1 - blend) * sum_k weights[k] * chain_images[k], clipped to [0, 1]."""
    mixture = np.zeros_like(clean)
    for w, img in zip(weights, chain_images):
        mixture += w * img
    return np.clip(blend * clean + (1.0 - blend) * mixture, 0.0, 1.0)


def _sample_chain(spec: AugChainSpec, rng: np.random.Generator):
    depth = int(rng.integers(1, spec.depth + 1))
    ops = []
    for _ in range(depth):
        kind = spec.pool[int(rng.integers(0, len(spec.pool)))]
        magnitude = float(rng.uniform(0.0, spec.magnitude_cap))
        ops.append((kind, magnitude))
    return ops


def chain_mix_image(image: np.ndarray, spec: AugChainSpec, rng: np.random.Generator,
                    force_blend: float | None = None) -> np.ndarray:
    """One augmented view of a single image."""
    weights = rng.dirichlet(np.full(spec.width, spec.dirichlet_alpha))
    chain_images = [compose_chain(image, _sample_chain(spec, rng)) for _ in range(spec.width)]
    blend = float(rng.beta(spec.beta_alpha, spec.beta_alpha)) if force_blend is None else float(force_blend)
    return mix_chains(image, chain_images, weights, blend)


def augmix_views(batch: ImageBatch, spec: AugChainSpec, rng: np.random.Generator,
                 force_blend: float | None = None) -> ConsistencyBatch:
    """Two independently sampled chain-mix views of every image in the batch."""
    views = []
    for _ in range(2):
        out = np.empty_like(batch.images)
        for i in range(len(batch)):
            out[i] = chain_mix_image(batch.images[i], spec, rng, force_blend=force_blend)
        views.append(out)
    return ConsistencyBatch(batch, views[0], views[1])
