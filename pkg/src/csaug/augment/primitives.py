"""Deterministic label-preserving image transforms used inside mixing chains.

Every transform maps a C x H x W image in [0, 1] back into [0, 1]. Magnitude
in [0, 1] scales the effect; kinds without a continuous knob ignore it.
"""
from __future__ import annotations

import numpy as np

PRIMITIVE_KINDS = (
    "identity",
    "translate-x",
    "translate-y",
    "flip-horizontal",
    "rotate90",
    "posterize-quantize",
    "contrast-scale",
    "brightness-shift",
)


def _translate(image: np.ndarray, shift: int, axis: int) -> np.ndarray:
    if shift == 0:
        return image.copy()
    out = np.zeros_like(image)
    if axis == 2:  # x: shift right
        out[:, :, shift:] = image[:, :, :-shift]
    else:  # y: shift down
        out[:, shift:, :] = image[:, :-shift, :]
    return out


def posterize_levels(magnitude: float) -> int:
    """Quantization level count for a magnitude: 8 levels at 0 down to 2 at 1."""
    return int(2 + round((1.0 - magnitude) * 6))


def primitive_transform(image: np.ndarray, kind: str, magnitude: float) -> np.ndarray:
    if kind not in PRIMITIVE_KINDS:
        raise ValueError(f"unknown primitive transform '{kind}' (valid: {PRIMITIVE_KINDS})")
    if not 0.0 <= magnitude <= 1.0:
        raise ValueError(f"magnitude must lie in [0, 1], got {magnitude}")
    c, h, w = image.shape

    if kind == "identity":
        out = image.copy()
    elif kind == "translate-x":
        out = _translate(image, int(round(magnitude * w / 2)), axis=2)
    elif kind == "translate-y":
        out = _translate(image, int(round(magnitude * h / 2)), axis=1)
    elif kind == "flip-horizontal":
        out = image[:, :, ::-1].copy()
    elif kind == "rotate90":
        if h != w:
            raise ValueError(f"rotate90 requires square images, got {h}x{w}")
        out = np.rot90(image, k=1, axes=(1, 2)).copy()
    elif kind == "posterize-quantize":
        levels = posterize_levels(magnitude)
        out = np.rint(image * (levels - 1)) / (levels - 1)
    elif kind == "contrast-scale":
        out = (image - 0.5) * (1.0 - 0.75 * magnitude) + 0.5
    else:  # brightness-shift
        out = image + 0.3 * magnitude
    return np.clip(out, 0.0, 1.0)
