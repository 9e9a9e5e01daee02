"""Dataset construction: rendered synthetic point sets and IDX file loading."""
from __future__ import annotations

import struct

import numpy as np

from .augment.batches import ImageBatch

IDX_IMAGES_MAGIC = 0x00000803
IDX_LABELS_MAGIC = 0x00000801

RENDER_SIGMA_PX = 1.0  # Gaussian bump radius in pixels


def render_points(points: np.ndarray, image_size: int) -> np.ndarray:
    """Render 2-D points in [0, 1]^2 as single-channel Gaussian-bump images."""
    coords = np.arange(image_size, dtype=np.float64)
    px = np.clip(points[:, 0], 0.05, 0.95) * (image_size - 1)
    py = np.clip(points[:, 1], 0.05, 0.95) * (image_size - 1)
    dx2 = (coords[None, None, :] - px[:, None, None]) ** 2
    dy2 = (coords[None, :, None] - py[:, None, None]) ** 2
    images = np.exp(-(dx2 + dy2) / (2.0 * RENDER_SIGMA_PX ** 2))
    return images[:, None, :, :]


def _balanced_labels(n: int, classes: int) -> np.ndarray:
    base, extra = divmod(n, classes)
    counts = [base + (1 if c < extra else 0) for c in range(classes)]
    return np.repeat(np.arange(classes), counts)


def _blob_points(labels: np.ndarray, classes: int, noise: float,
                 rng: np.random.Generator) -> np.ndarray:
    angles = 2.0 * np.pi * labels / classes
    centers = np.stack([0.5 + 0.3 * np.cos(angles), 0.5 + 0.3 * np.sin(angles)], axis=1)
    return centers + noise * rng.standard_normal(centers.shape)


def _moon_points(labels: np.ndarray, noise: float, rng: np.random.Generator) -> np.ndarray:
    t = rng.uniform(0.0, np.pi, size=labels.shape[0])
    outer = np.stack([np.cos(t), np.sin(t)], axis=1)
    inner = np.stack([1.0 - np.cos(t), 0.5 - np.sin(t)], axis=1)
    pts = np.where(labels[:, None] == 0, outer, inner)
    pts += noise * rng.standard_normal(pts.shape)
    # map the moons' bounding box into the unit square with a small border
    pts[:, 0] = 0.1 + 0.8 * (pts[:, 0] + 1.0) / 3.0
    pts[:, 1] = 0.1 + 0.8 * (pts[:, 1] + 0.5) / 1.5
    return pts


def make_synthetic(kind: str, n: int, classes: int, noise: float, seed: int,
                   n_test: int | None = None, image_size: int = 8):
    """Deterministic class-balanced train/test splits of rendered point data.

    Returns ``(train, test)`` ImageBatches with disjoint samples drawn from
    the same distribution.
    """
    if kind not in ("blobs", "two-moons"):
        raise ValueError(f"unknown synthetic dataset kind '{kind}'")
    if kind == "two-moons" and classes != 2:
        raise ValueError(f"two-moons is a 2-class dataset, got classes={classes}")
    if n < classes:
        raise ValueError(f"need at least one sample per class: n={n}, classes={classes}")
    if n_test is None:
        n_test = n
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))

    batches = []
    for count in (n, n_test):
        labels = _balanced_labels(count, classes)
        if kind == "blobs":
            points = _blob_points(labels, classes, noise, rng)
        else:
            points = _moon_points(labels, noise, rng)
        order = rng.permutation(count)
        batches.append(ImageBatch(render_points(points, image_size)[order], labels[order]))
    return batches[0], batches[1]


def _read_exact(fh, count: int, path: str, what: str) -> bytes:
    data = fh.read(count)
    if len(data) != count:
        raise ValueError(f"truncated IDX file '{path}' while reading {what}")
    return data


def load_idx_dataset(images_path: str, labels_path: str, limit: int | None = None) -> ImageBatch:
    """Load an IDX image/label file pair, scaling pixels to [0, 1].

    ``limit`` truncates to the first N samples (0 gives an empty batch;
    None keeps everything).
    """
    with open(images_path, "rb") as fh:
        magic, count, rows, cols = struct.unpack(">IIII", _read_exact(fh, 16, images_path, "header"))
        if magic != IDX_IMAGES_MAGIC:
            raise ValueError(
                f"images file '{images_path}' has magic 0x{magic:08x}, expected 0x{IDX_IMAGES_MAGIC:08x}"
            )
        raw = _read_exact(fh, count * rows * cols, images_path, "pixel data")
        images = np.frombuffer(raw, dtype=np.uint8).reshape(count, 1, rows, cols)

    with open(labels_path, "rb") as fh:
        magic, label_count = struct.unpack(">II", _read_exact(fh, 8, labels_path, "header"))
        if magic != IDX_LABELS_MAGIC:
            raise ValueError(
                f"labels file '{labels_path}' has magic 0x{magic:08x}, expected 0x{IDX_LABELS_MAGIC:08x}"
            )
        labels = np.frombuffer(_read_exact(fh, label_count, labels_path, "label data"), dtype=np.uint8)

    if count != label_count:
        raise ValueError(
            f"image count {count} in '{images_path}' does not match label count {label_count}"
        )
    if limit is not None:
        images = images[:limit]
        labels = labels[:limit]
    return ImageBatch(images.astype(np.float64) / 255.0, labels.astype(np.int64))
