"""Reverse-mode autodiff on dense float64 numpy arrays.

A ``Tensor`` wraps an ndarray plus the graph edge that produced it. Calling
``backward()`` on a scalar accumulates gradients into every reachable tensor
that requires them; repeated backward calls accumulate additively until
``grad`` is cleared.
"""
from __future__ import annotations

import numpy as np

from . import kernels


def _as_array(data) -> np.ndarray:
    return np.asarray(data, dtype=np.float64)


def _unbroadcast(grad: np.ndarray, shape: tuple) -> np.ndarray:
    """Sum `grad` down to `shape` (inverse of numpy broadcasting)."""
    if grad.shape == shape:
        return grad
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, s in enumerate(shape) if s == 1 and grad.shape[i] != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad.reshape(shape)


class Tensor:
    """Dense float64 array node in a reverse-mode differentiation graph."""

    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward")

    def __init__(self, data, requires_grad: bool = False, _parents=(), _backward=None):
        self.data = _as_array(data)
        self.grad = None
        self.requires_grad = bool(requires_grad)
        self._parents = _parents
        self._backward = _backward

    # -- plumbing ---------------------------------------------------------

    @property
    def shape(self):
        return self.data.shape

    @property
    def ndim(self):
        return self.data.ndim

    def item(self) -> float:
        return float(self.data)

    def detach(self) -> "Tensor":
        return Tensor(self.data)

    def __repr__(self):
        return f"Tensor(shape={self.data.shape}, requires_grad={self.requires_grad})"

    @staticmethod
    def _lift(other) -> "Tensor":
        return other if isinstance(other, Tensor) else Tensor(other)

    @staticmethod
    def _node(data, parents, backward) -> "Tensor":
        req = any(p.requires_grad for p in parents)
        if not req:
            return Tensor(data)
        return Tensor(data, requires_grad=True, _parents=parents, _backward=backward)

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other):
        other = self._lift(other)
        out_data = self.data + other.data

        def backward(g):
            return (_unbroadcast(g, self.data.shape), _unbroadcast(g, other.data.shape))

        return self._node(out_data, (self, other), backward)

    __radd__ = __add__

    def __neg__(self):
        def backward(g):
            return (-g,)

        return self._node(-self.data, (self,), backward)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) + (-self)

    def __mul__(self, other):
        other = self._lift(other)
        out_data = self.data * other.data

        def backward(g):
            return (
                _unbroadcast(g * other.data, self.data.shape),
                _unbroadcast(g * self.data, other.data.shape),
            )

        return self._node(out_data, (self, other), backward)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._lift(other)
        out_data = self.data / other.data

        def backward(g):
            return (
                _unbroadcast(g / other.data, self.data.shape),
                _unbroadcast(-g * self.data / (other.data * other.data), other.data.shape),
            )

        return self._node(out_data, (self, other), backward)

    def __rtruediv__(self, other):
        return self._lift(other) / self

    def __pow__(self, exponent):
        if not isinstance(exponent, (int, float)):
            raise TypeError("only scalar exponents are supported")
        out_data = self.data ** exponent

        def backward(g):
            return (g * exponent * self.data ** (exponent - 1),)

        return self._node(out_data, (self,), backward)

    def __matmul__(self, other):
        other = self._lift(other)
        if self.data.ndim != 2 or other.data.ndim != 2:
            raise ValueError(
                f"matmul expects 2-D operands, got {self.data.shape} @ {other.data.shape}"
            )
        if self.data.shape[1] != other.data.shape[0]:
            raise ValueError(
                f"matmul inner dimensions differ: {self.data.shape} @ {other.data.shape}"
            )
        out_data = self.data @ other.data

        def backward(g):
            return (g @ other.data.T, self.data.T @ g)

        return self._node(out_data, (self, other), backward)

    # -- elementwise ------------------------------------------------------

    def exp(self):
        out_data = np.exp(self.data)

        def backward(g):
            return (g * out_data,)

        return self._node(out_data, (self,), backward)

    def log(self):
        out_data = np.log(self.data)

        def backward(g):
            return (g / self.data,)

        return self._node(out_data, (self,), backward)

    def sqrt(self):
        out_data = np.sqrt(self.data)

        def backward(g):
            # subgradient 0 at exactly 0 keeps hinge losses finite there
            out = np.zeros_like(out_data)
            np.divide(g * 0.5, out_data, out=out, where=out_data > 0.0)
            return (out,)

        return self._node(out_data, (self,), backward)

    def relu(self):
        mask = self.data > 0.0
        out_data = np.where(mask, self.data, 0.0)

        def backward(g):
            return (g * mask,)

        return self._node(out_data, (self,), backward)

    def clip_min(self, floor: float):
        """max(self, floor) with zero gradient where the floor is active."""
        return (self - floor).relu() + floor

    # -- reductions / shaping ---------------------------------------------

    def sum(self, axis=None, keepdims: bool = False):
        out_data = self.data.sum(axis=axis, keepdims=keepdims)

        def backward(g):
            if axis is None:
                return (np.broadcast_to(g, self.data.shape).copy(),)
            g_exp = g if keepdims else np.expand_dims(g, axis)
            return (np.broadcast_to(g_exp, self.data.shape).copy(),)

        return self._node(out_data, (self,), backward)

    def mean(self, axis=None, keepdims: bool = False):
        if axis is None:
            n = self.data.size
        else:
            n = self.data.shape[axis]
        return self.sum(axis=axis, keepdims=keepdims) * (1.0 / n)

    def reshape(self, *shape):
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        out_data = self.data.reshape(shape)

        def backward(g):
            return (g.reshape(self.data.shape),)

        return self._node(out_data, (self,), backward)

    def flatten2d(self):
        """Collapse all axes after the first into one (batch stays)."""
        return self.reshape(self.data.shape[0], -1)

    def transpose(self):
        if self.data.ndim != 2:
            raise ValueError(f"transpose expects a 2-D tensor, got shape {self.data.shape}")
        out_data = self.data.T.copy()

        def backward(g):
            return (g.T.copy(),)

        return self._node(out_data, (self,), backward)

    def take_rows(self, indices):
        """Gather rows along axis 0; backward scatter-adds into the source."""
        idx = np.asarray(indices, dtype=np.intp)
        out_data = self.data[idx]

        def backward(g):
            acc = np.zeros_like(self.data)
            np.add.at(acc, idx, g)
            return (acc,)

        return self._node(out_data, (self,), backward)

    # -- backward ---------------------------------------------------------

    def backward(self):
        if self.data.size != 1:
            raise ValueError(f"backward root must be scalar, got shape {self.data.shape}")
        topo = []
        visited = set()
        stack = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                topo.append(node)
                continue
            if id(node) in visited or not node.requires_grad:
                continue
            visited.add(id(node))
            stack.append((node, True))
            for parent in node._parents:
                stack.append((parent, False))

        scratch = {id(self): np.ones_like(self.data)}
        for node in reversed(topo):
            g = scratch.pop(id(node), None)
            if g is None:
                continue
            if node.grad is None:
                node.grad = g.copy()
            else:
                node.grad = node.grad + g
            if node._backward is None:
                continue
            parent_grads = node._backward(g)
            for parent, pg in zip(node._parents, parent_grads):
                if not parent.requires_grad or pg is None:
                    continue
                key = id(parent)
                if key in scratch:
                    scratch[key] = scratch[key] + pg
                else:
                    scratch[key] = pg


def concat_rows(tensors) -> Tensor:
    """Stack 2-D tensors along axis 0; backward splits the gradient."""
    tensors = list(tensors)
    sizes = [t.data.shape[0] for t in tensors]
    out_data = np.concatenate([t.data for t in tensors], axis=0)

    def backward(g):
        grads = []
        start = 0
        for n in sizes:
            grads.append(g[start:start + n])
            start += n
        return tuple(grads)

    return Tensor._node(out_data, tuple(tensors), backward)


def linear(inputs: Tensor, weights: Tensor, bias: Tensor) -> Tensor:
    """Affine map ``inputs @ weights + bias`` with shape checking."""
    if inputs.data.ndim != 2 or weights.data.ndim != 2:
        raise ValueError(
            f"linear expects 2-D input and weights, got {inputs.data.shape} and {weights.data.shape}"
        )
    if inputs.data.shape[1] != weights.data.shape[0]:
        raise ValueError(
            f"linear input width {inputs.data.shape[1]} does not match weight rows {weights.data.shape[0]}"
        )
    if bias.data.shape != (weights.data.shape[1],):
        raise ValueError(
            f"linear bias shape {bias.data.shape} does not match output width {weights.data.shape[1]}"
        )
    return inputs @ weights + bias


def conv2d(inputs: Tensor, kernels_t: Tensor, bias: Tensor, stride: int = 1, padding: int = 0) -> Tensor:
    """2-D cross-correlation over NCHW inputs, dispatched to the active kernel backend."""
    x, w, b = inputs.data, kernels_t.data, bias.data
    if x.ndim != 4 or w.ndim != 4:
        raise ValueError(f"conv2d expects 4-D input and kernels, got {x.shape} and {w.shape}")
    if x.shape[1] != w.shape[1]:
        raise ValueError(
            f"conv2d channel mismatch: input has {x.shape[1]} channels, kernels expect {w.shape[1]}"
        )
    if b.shape != (w.shape[0],):
        raise ValueError(f"conv2d bias shape {b.shape} does not match {w.shape[0]} kernels")
    if stride < 1:
        raise ValueError(f"conv2d stride must be >= 1, got {stride}")
    if w.shape[2] > x.shape[2] + 2 * padding or w.shape[3] > x.shape[3] + 2 * padding:
        raise ValueError(
            f"conv2d kernel {w.shape[2]}x{w.shape[3]} larger than padded input "
            f"{x.shape[2] + 2 * padding}x{x.shape[3] + 2 * padding}"
        )
    out_data = kernels.conv2d_forward(x, w, b, stride, padding)

    def backward(g):
        gx, gw, gb = kernels.conv2d_backward(x, w, stride, padding, g)
        return (gx, gw, gb)

    return Tensor._node(out_data, (inputs, kernels_t, bias), backward)


def softmax(logits: Tensor) -> Tensor:
    """Row-wise softmax of a B x C tensor."""
    if logits.data.ndim != 2:
        raise ValueError(f"softmax expects a 2-D tensor, got shape {logits.data.shape}")
    shifted = logits.data - logits.data.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    p = e / e.sum(axis=1, keepdims=True)

    def backward(g):
        dot = (g * p).sum(axis=1, keepdims=True)
        return (p * (g - dot),)

    return Tensor._node(p, (logits,), backward)


def softmax_cross_entropy(logits: Tensor, labels) -> Tensor:
    """Mean over the batch of -log softmax(logits)[label], stabilized by max subtraction."""
    if logits.data.ndim != 2:
        raise ValueError(f"cross entropy expects B x C logits, got shape {logits.data.shape}")
    y = np.asarray(labels)
    if y.ndim != 1 or y.shape[0] != logits.data.shape[0]:
        raise ValueError(
            f"labels shape {y.shape} does not match batch size {logits.data.shape[0]}"
        )
    n_classes = logits.data.shape[1]
    if y.size and (y.min() < 0 or y.max() >= n_classes):
        raise IndexError(f"labels must lie in [0, {n_classes}), got range [{y.min()}, {y.max()}]")
    b = logits.data.shape[0]
    shifted = logits.data - logits.data.max(axis=1, keepdims=True)
    lse = np.log(np.exp(shifted).sum(axis=1))
    loss = float(np.mean(lse - shifted[np.arange(b), y]))

    def backward(g):
        p = np.exp(shifted)
        p /= p.sum(axis=1, keepdims=True)
        p[np.arange(b), y] -= 1.0
        return (g * p / b,)

    return Tensor._node(loss, (logits,), backward)
