# Compiled conv2d kernels (NCHW cross-correlation, float64).
import numpy as np

cimport numpy as cnp

cnp.import_array()


def conv2d_forward(double[:, :, :, ::1] x, double[:, :, :, ::1] w,
                   double[::1] bias, int stride, int padding):
    cdef Py_ssize_t B = x.shape[0], C = x.shape[1], H = x.shape[2], W = x.shape[3]
    cdef Py_ssize_t K = w.shape[0], kh = w.shape[2], kw = w.shape[3]
    cdef Py_ssize_t OH = (H + 2 * padding - kh) // stride + 1
    cdef Py_ssize_t OW = (W + 2 * padding - kw) // stride + 1
    out_arr = np.empty((B, K, OH, OW), dtype=np.float64)
    cdef double[:, :, :, ::1] out = out_arr
    cdef Py_ssize_t b, k, c, oh, ow, i, j, ih, iw
    cdef double acc
    with nogil:
        for b in range(B):
            for k in range(K):
                for oh in range(OH):
                    for ow in range(OW):
                        acc = bias[k]
                        for c in range(C):
                            for i in range(kh):
                                ih = oh * stride + i - padding
                                if ih < 0 or ih >= H:
                                    continue
                                for j in range(kw):
                                    iw = ow * stride + j - padding
                                    if iw < 0 or iw >= W:
                                        continue
                                    acc += x[b, c, ih, iw] * w[k, c, i, j]
                        out[b, k, oh, ow] = acc
    return out_arr


def conv2d_backward(double[:, :, :, ::1] x, double[:, :, :, ::1] w,
                    int stride, int padding, double[:, :, :, ::1] grad_out):
    cdef Py_ssize_t B = x.shape[0], C = x.shape[1], H = x.shape[2], W = x.shape[3]
    cdef Py_ssize_t K = w.shape[0], kh = w.shape[2], kw = w.shape[3]
    cdef Py_ssize_t OH = grad_out.shape[2], OW = grad_out.shape[3]
    gx_arr = np.zeros((B, C, H, W), dtype=np.float64)
    gw_arr = np.zeros((K, C, kh, kw), dtype=np.float64)
    gb_arr = np.zeros(K, dtype=np.float64)
    cdef double[:, :, :, ::1] gx = gx_arr
    cdef double[:, :, :, ::1] gw = gw_arr
    cdef double[::1] gb = gb_arr
    cdef Py_ssize_t b, k, c, oh, ow, i, j, ih, iw
    cdef double g
    with nogil:
        for b in range(B):
            for k in range(K):
                for oh in range(OH):
                    for ow in range(OW):
                        g = grad_out[b, k, oh, ow]
                        gb[k] += g
                        for c in range(C):
                            for i in range(kh):
                                ih = oh * stride + i - padding
                                if ih < 0 or ih >= H:
                                    continue
                                for j in range(kw):
                                    iw = ow * stride + j - padding
                                    if iw < 0 or iw >= W:
                                        continue
                                    gw[k, c, i, j] += x[b, c, ih, iw] * g
                                    gx[b, c, ih, iw] += w[k, c, i, j] * g
    return gx_arr, gw_arr, gb_arr
