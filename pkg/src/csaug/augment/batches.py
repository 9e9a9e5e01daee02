"""Batch containers passed between augmentation, training, and evaluation."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class ImageBatch:
    """Images in NCHW layout with values in [0, 1] plus integer class labels."""

    images: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        self.images = np.asarray(self.images, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.images.ndim != 4:
            raise ValueError(f"images must be B x C x H x W, got shape {self.images.shape}")
        if self.labels.shape != (self.images.shape[0],):
            raise ValueError(
                f"label count {self.labels.shape} does not match batch size {self.images.shape[0]}"
            )
        if not np.isfinite(self.images).all():
            raise ValueError("images contain non-finite values")

    def __len__(self) -> int:
        return self.images.shape[0]

    def subset(self, indices) -> "ImageBatch":
        idx = np.asarray(indices)
        return ImageBatch(self.images[idx], self.labels[idx])


@dataclass
class MixedBatch:
    """Pixel-mixed images with both source label sets and the mixing ratio."""

    mixed_images: np.ndarray
    labels_a: np.ndarray
    labels_b: np.ndarray
    lambda_m: float

    def __post_init__(self):
        if not 0.0 <= self.lambda_m <= 1.0:
            raise ValueError(f"lambda_m must lie in [0, 1], got {self.lambda_m}")


@dataclass
class ConsistencyBatch:
    """A clean batch plus two independently augmented views of the same images."""

    clean: ImageBatch
    aug1: np.ndarray
    aug2: np.ndarray

    def __post_init__(self):
        if self.aug1.shape != self.clean.images.shape or self.aug2.shape != self.clean.images.shape:
            raise ValueError("augmented views must match the clean batch shape")
