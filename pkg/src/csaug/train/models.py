"""Feature-extractor / classifier model pairs at desk scale."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..engine.nn import Conv2d, Flatten, Linear, Module, ReLU, Sequential
from ..engine.tensor import Tensor


@dataclass
class ModelSplit:
    """Embedding network plus classification head; the full model is h(g(x))."""

    extractor: Module
    classifier: Module

    def forward(self, x: Tensor):
        feats = self.extractor(x)
        return feats, self.classifier(feats)

    def predict(self, images: np.ndarray) -> np.ndarray:
        _, logits = self.forward(Tensor(images))
        return logits.data.argmax(axis=1)

    def named_parameters(self):
        yield from self.extractor.named_parameters("g.")
        yield from self.classifier.named_parameters("h.")

    def parameters(self):
        return [p for _, p in self.named_parameters()]

    def zero_grad(self):
        for p in self.parameters():
            p.grad = None


def build_mlp(input_shape, hidden, embed_dim: int, classes: int,
              rng: np.random.Generator) -> ModelSplit:
    c, h, w = input_shape
    widths = [c * h * w] + list(hidden) + [embed_dim]
    layers = [Flatten()]
    for a, b in zip(widths[:-1], widths[1:]):
        layers += [Linear(a, b, rng), ReLU()]
    layers.pop()  # embedding output stays linear
    return ModelSplit(Sequential(*layers), Linear(embed_dim, classes, rng))


def build_cnn(input_shape, channels, embed_dim: int, classes: int,
              rng: np.random.Generator) -> ModelSplit:
    c, h, w = input_shape
    c1, c2 = channels
    flat = c2 * (h // 2) * (w // 2)
    extractor = Sequential(
        Conv2d(c, c1, 3, rng, stride=1, padding=1),
        ReLU(),
        Conv2d(c1, c2, 3, rng, stride=2, padding=1),
        ReLU(),
        Flatten(),
        Linear(flat, embed_dim, rng),
    )
    return ModelSplit(extractor, Linear(embed_dim, classes, rng))
