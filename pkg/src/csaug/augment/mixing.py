"""MixUp and CutMix batch augmentation."""
from __future__ import annotations

import numpy as np

from .batches import ImageBatch, MixedBatch


def mixup(batch: ImageBatch, alpha: float, rng: np.random.Generator,
          force_lambda: float | None = None) -> MixedBatch:
    """Convex pixel blend of each image with a permuted partner.

    lambda_m ~ Beta(alpha, alpha) unless ``force_lambda`` pins it (testing
    hook). Labels of both sources are kept for the dual cross-entropy.
    """
    if alpha <= 0:
        raise ValueError(f"mixup alpha must be > 0, got {alpha}")
    if len(batch) == 0:
        raise ValueError("mixup requires a non-empty batch")
    lam = float(rng.beta(alpha, alpha)) if force_lambda is None else float(force_lambda)
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lambda_m must lie in [0, 1], got {lam}")
    perm = rng.permutation(len(batch))
    mixed = lam * batch.images + (1.0 - lam) * batch.images[perm]
    return MixedBatch(mixed, batch.labels.copy(), batch.labels[perm], lam)


def rand_bbox(lambda_m: float, height: int, width: int, rng: np.random.Generator,
              force_center: tuple | None = None) -> tuple:
    """Cut box (y0, x0, y1, x1) with target area ratio 1 - lambda_m.

    Side lengths follow the square-root rule; the center is uniform unless
    forced, and the box is clipped to the image, which can shrink it.
    """
    if not 0.0 <= lambda_m <= 1.0:
        raise ValueError(f"lambda_m must lie in [0, 1], got {lambda_m}")
    cut_ratio = np.sqrt(1.0 - lambda_m)
    cut_h = int(height * cut_ratio)
    cut_w = int(width * cut_ratio)
    if force_center is None:
        cy = int(rng.integers(0, height))
        cx = int(rng.integers(0, width))
    else:
        cy, cx = force_center
    y0 = max(cy - cut_h // 2, 0)
    x0 = max(cx - cut_w // 2, 0)
    y1 = min(cy + (cut_h + 1) // 2, height)
    x1 = min(cx + (cut_w + 1) // 2, width)
    return y0, x0, y1, x1


def cutmix(batch: ImageBatch, alpha: float, rng: np.random.Generator,
           force_lambda: float | None = None,
           force_center: tuple | None = None) -> MixedBatch:
    """Paste a partner patch into each image; lambda_m is recomputed from the clipped box."""
    if alpha <= 0:
        raise ValueError(f"cutmix alpha must be > 0, got {alpha}")
    if len(batch) == 0:
        raise ValueError("cutmix requires a non-empty batch")
    lam = float(rng.beta(alpha, alpha)) if force_lambda is None else float(force_lambda)
    perm = rng.permutation(len(batch))
    h, w = batch.images.shape[2], batch.images.shape[3]
    y0, x0, y1, x1 = rand_bbox(lam, h, w, rng, force_center=force_center)
    mixed = batch.images.copy()
    mixed[:, :, y0:y1, x0:x1] = batch.images[perm][:, :, y0:y1, x0:x1]
    box_area = (y1 - y0) * (x1 - x0)
    adjusted = 1.0 - box_area / (h * w)
    return MixedBatch(mixed, batch.labels.copy(), batch.labels[perm], adjusted)
