"""Severity-graded test-time corruptions for robust-accuracy evaluation.

Seven kinds at five severities; the parameters live in the shipped
``corruption_params.cfg`` so the robust-accuracy metric is a fixed,
reproducible contract. Severity 0 is the identity (useful as a control).
"""
from __future__ import annotations

import configparser
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .batches import ImageBatch

CORRUPTION_KINDS = (
    "gaussian-noise",
    "shot-noise-analog",
    "box-blur",
    "quantize",
    "occlusion-patch",
    "brightness-shift",
    "contrast-scale",
)

SEVERITIES = (1, 2, 3, 4, 5)


def load_severity_table(path=None) -> dict:
    """Parse the severity parameter table; defaults to the packaged file."""
    parser = configparser.ConfigParser()
    if path is None:
        text = resources.files("csaug.augment").joinpath("corruption_params.cfg").read_text()
        parser.read_string(text)
    else:
        with open(path) as fh:
            parser.read_file(fh)
    table = {}
    for kind in CORRUPTION_KINDS:
        if not parser.has_section(kind):
            raise ValueError(f"corruption table is missing section [{kind}]")
        table[kind] = {s: float(parser[kind][f"s{s}"]) for s in SEVERITIES}
    return table


SEVERITY_TABLE = load_severity_table()


@dataclass(frozen=True)
class CorruptionSpec:
    kind: str
    severity: int

    def __post_init__(self):
        if self.kind not in CORRUPTION_KINDS:
            raise ValueError(f"unknown corruption kind '{self.kind}' (valid: {CORRUPTION_KINDS})")
        if self.severity not in (0,) + SEVERITIES:
            raise ValueError(f"severity must be 0 (identity) or 1..5, got {self.severity}")

    @property
    def parameter(self) -> float:
        return SEVERITY_TABLE[self.kind][self.severity]


def full_suite() -> list:
    """Every (kind, severity) cell of the shipped table."""
    return [CorruptionSpec(kind, s) for kind in CORRUPTION_KINDS for s in SEVERITIES]


def _box_blur3(images: np.ndarray) -> np.ndarray:
    padded = np.pad(images, ((0, 0), (0, 0), (1, 1), (1, 1)), mode="edge")
    out = np.zeros_like(images)
    for dy in range(3):
        for dx in range(3):
            out += padded[:, :, dy:dy + images.shape[2], dx:dx + images.shape[3]]
    return out / 9.0


def corrupt(batch: ImageBatch, spec: CorruptionSpec, rng: np.random.Generator) -> ImageBatch:
    """Corrupted copy of the batch; labels are unchanged."""
    if spec.severity == 0:
        return ImageBatch(batch.images.copy(), batch.labels.copy())
    x = batch.images
    param = spec.parameter

    if spec.kind == "gaussian-noise":
        out = x + rng.normal(0.0, param, x.shape)
    elif spec.kind == "shot-noise-analog":
        out = rng.poisson(x * param) / param
    elif spec.kind == "box-blur":
        out = x
        for _ in range(int(param)):
            out = _box_blur3(out)
    elif spec.kind == "quantize":
        levels = int(param)
        out = np.rint(x * (levels - 1)) / (levels - 1)
    elif spec.kind == "occlusion-patch":
        side = int(param)
        out = x.copy()
        h, w = x.shape[2], x.shape[3]
        for i in range(x.shape[0]):
            y0 = int(rng.integers(0, h - side + 1))
            x0 = int(rng.integers(0, w - side + 1))
            out[i, :, y0:y0 + side, x0:x0 + side] = 0.5
    elif spec.kind == "brightness-shift":
        out = x + param
    else:  # contrast-scale
        out = (x - 0.5) * param + 0.5

    return ImageBatch(np.clip(out, 0.0, 1.0), batch.labels.copy())
