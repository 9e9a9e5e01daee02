from .tensor import (
    Tensor,
    concat_rows,
    conv2d,
    linear,
    softmax,
    softmax_cross_entropy,
)
from .nn import Conv2d, Flatten, Linear, Module, ReLU, Sequential
from .optim import SGD, Adam, cosine_anneal_lr, step_decay_lr
from .gradcheck import GradCheckReport, finite_diff_gradcheck
from .kernels import active_backend

__all__ = [
    "Tensor", "concat_rows", "conv2d", "linear", "softmax", "softmax_cross_entropy",
    "Conv2d", "Flatten", "Linear", "Module", "ReLU", "Sequential",
    "SGD", "Adam", "cosine_anneal_lr", "step_decay_lr",
    "GradCheckReport", "finite_diff_gradcheck", "active_backend",
]
