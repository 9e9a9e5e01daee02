"""Optimizers and learning-rate schedules."""
from __future__ import annotations

import math

import numpy as np


class SGD:
    """SGD with classic momentum: v <- mu*v + (grad + wd*param); param <- param - lr*v."""

    def __init__(self, named_params, lr: float, momentum: float = 0.0, weight_decay: float = 0.0):
        self.params = dict(named_params)
        self.lr = lr
        self.momentum = momentum
        self.weight_decay = weight_decay
        self.velocity = {name: np.zeros_like(p.data) for name, p in self.params.items()}
        self.step_count = 0

    def step(self):
        for name, p in self.params.items():
            if p.grad is None:
                raise ValueError(f"parameter '{name}' has no gradient; run backward first")
            g = p.grad + self.weight_decay * p.data if self.weight_decay else p.grad
            v = self.velocity[name]
            v *= self.momentum
            v += g
            p.data -= self.lr * v
        self.step_count += 1

    def zero_grad(self):
        for p in self.params.values():
            p.grad = None


class Adam:
    """Bias-corrected Adam; weight decay applied as classic L2 on the gradient."""

    def __init__(self, named_params, lr: float, betas=(0.9, 0.999), eps: float = 1e-8,
                 weight_decay: float = 0.0):
        self.params = dict(named_params)
        self.lr = lr
        self.beta1, self.beta2 = betas
        self.eps = eps
        self.weight_decay = weight_decay
        self.m = {name: np.zeros_like(p.data) for name, p in self.params.items()}
        self.v = {name: np.zeros_like(p.data) for name, p in self.params.items()}
        self.step_count = 0

    def step(self):
        self.step_count += 1
        t = self.step_count
        bc1 = 1.0 - self.beta1 ** t
        bc2 = 1.0 - self.beta2 ** t
        for name, p in self.params.items():
            if p.grad is None:
                raise ValueError(f"parameter '{name}' has no gradient; run backward first")
            g = p.grad + self.weight_decay * p.data if self.weight_decay else p.grad
            m = self.m[name]
            v = self.v[name]
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * (g * g)
            p.data -= self.lr * (m / bc1) / (np.sqrt(v / bc2) + self.eps)

    def zero_grad(self):
        for p in self.params.values():
            p.grad = None


def cosine_anneal_lr(base_lr: float, epoch: int, total_epochs: int) -> float:
    """base_lr * (1 + cos(pi * epoch / total_epochs)) / 2 for epoch in [0, total_epochs]."""
    if not 0 <= epoch <= total_epochs:
        raise ValueError(f"epoch {epoch} outside [0, {total_epochs}]")
    return base_lr * (1.0 + math.cos(math.pi * epoch / total_epochs)) / 2.0


def step_decay_lr(base_lr: float, epoch: int, period: int, factor: float) -> float:
    """base_lr * factor ** floor(epoch / period)."""
    if period < 1:
        raise ValueError(f"period must be >= 1, got {period}")
    return base_lr * factor ** (epoch // period)
