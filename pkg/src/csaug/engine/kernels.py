"""Convolution kernels with a compiled core and a pure-numpy fallback.

The compiled extension (``csaug.engine._convext``) is used when it imported
cleanly and ``CSAUG_PURE_PYTHON`` is unset; otherwise the im2col-based numpy
path runs. Both produce identical shapes and agree to float64 rounding.
"""
from __future__ import annotations

import os

import numpy as np

try:
    from . import _convext as _ext
except ImportError:  # pragma: no cover - depends on build environment
    _ext = None

_FORCE_PY = os.environ.get("CSAUG_PURE_PYTHON", "") not in ("", "0")


def conv_out_shape(h: int, w: int, kh: int, kw: int, stride: int, padding: int) -> tuple:
    oh = (h + 2 * padding - kh) // stride + 1
    ow = (w + 2 * padding - kw) // stride + 1
    return oh, ow


def _im2col(xp: np.ndarray, kh: int, kw: int, stride: int, oh: int, ow: int) -> np.ndarray:
    b, c = xp.shape[:2]
    cols = np.empty((b, c, kh, kw, oh, ow), dtype=np.float64)
    for i in range(kh):
        for j in range(kw):
            cols[:, :, i, j] = xp[:, :, i:i + stride * oh:stride, j:j + stride * ow:stride]
    return cols.reshape(b, c * kh * kw, oh * ow)


def conv2d_forward_py(x, w, bias, stride, padding):
    b, c, h, wd = x.shape
    k, _, kh, kw = w.shape
    oh, ow = conv_out_shape(h, wd, kh, kw, stride, padding)
    xp = np.pad(x, ((0, 0), (0, 0), (padding, padding), (padding, padding))) if padding else x
    cols = _im2col(xp, kh, kw, stride, oh, ow)
    out = np.einsum("kc,bcl->bkl", w.reshape(k, -1), cols, optimize=True)
    out += bias[None, :, None]
    return out.reshape(b, k, oh, ow)


def conv2d_backward_py(x, w, stride, padding, grad_out):
    b, c, h, wd = x.shape
    k, _, kh, kw = w.shape
    oh, ow = grad_out.shape[2], grad_out.shape[3]
    xp = np.pad(x, ((0, 0), (0, 0), (padding, padding), (padding, padding))) if padding else x
    cols = _im2col(xp, kh, kw, stride, oh, ow)
    go = grad_out.reshape(b, k, oh * ow)

    grad_b = go.sum(axis=(0, 2))
    grad_w = np.einsum("bkl,bcl->kc", go, cols, optimize=True).reshape(w.shape)

    gcols = np.einsum("kc,bkl->bcl", w.reshape(k, -1), go, optimize=True)
    gcols = gcols.reshape(b, c, kh, kw, oh, ow)
    gxp = np.zeros_like(xp)
    for i in range(kh):
        for j in range(kw):
            gxp[:, :, i:i + stride * oh:stride, j:j + stride * ow:stride] += gcols[:, :, i, j]
    if padding:
        gxp = gxp[:, :, padding:-padding, padding:-padding]
    return gxp, grad_w, grad_b


def _forward_ext(x, w, bias, stride, padding):
    return _ext.conv2d_forward(
        np.ascontiguousarray(x), np.ascontiguousarray(w),
        np.ascontiguousarray(bias), stride, padding,
    )


def _backward_ext(x, w, stride, padding, grad_out):
    return _ext.conv2d_backward(
        np.ascontiguousarray(x), np.ascontiguousarray(w),
        stride, padding, np.ascontiguousarray(grad_out),
    )


if _ext is not None and not _FORCE_PY:
    conv2d_forward = _forward_ext
    conv2d_backward = _backward_ext
    BACKEND = "compiled"
else:
    conv2d_forward = conv2d_forward_py
    conv2d_backward = conv2d_backward_py
    BACKEND = "python"


def active_backend() -> str:
    """Name of the convolution backend selected at import time."""
    return BACKEND
