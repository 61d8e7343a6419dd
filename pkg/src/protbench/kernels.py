"""Hot numeric kernels for the 1-D convolution forward/backward passes.

Two interchangeable implementations are provided: numba ``@njit`` loops and a
pure-numpy path built on ``sliding_window_view``/``einsum``.  The numpy path is
selected by setting ``PROTBENCH_NO_NUMBA=1`` in the environment (or whenever
numba is unavailable).  ``benchmarks/bench_kernels.py`` compares the two.

Shapes follow the layer convention: input ``x`` is ``[L, c_in]`` (already
zero-padded by the caller for "same" mode), weights are ``[k, c_in, c_out]``
and the output is ``[L - k + 1, c_out]``.
"""

import os

import numpy as np

_DISABLE = os.environ.get("PROTBENCH_NO_NUMBA", "0").lower() in ("1", "true", "yes")

if not _DISABLE:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover
        _DISABLE = True

USE_NUMBA = not _DISABLE


def _conv1d_forward_np(x, w):
    k = w.shape[0]
    windows = np.lib.stride_tricks.sliding_window_view(x, k, axis=0)  # [L', c_in, k]
    return np.einsum("tik,kio->to", windows, w, optimize=True)


def _conv1d_backward_np(x, w, gy):
    k = w.shape[0]
    windows = np.lib.stride_tricks.sliding_window_view(x, k, axis=0)
    gw = np.einsum("tik,to->kio", windows, gy, optimize=True)
    gx = np.zeros_like(x)
    # scatter each output position's contribution back over its window
    contrib = np.einsum("to,kio->tki", gy, w, optimize=True)
    for t in range(gy.shape[0]):
        gx[t : t + k] += contrib[t]
    return gx, gw


if USE_NUMBA:

    @njit(cache=True)
    def _conv1d_forward_nb(x, w):
        k, c_in, c_out = w.shape
        lo = x.shape[0] - k + 1
        y = np.zeros((lo, c_out), dtype=x.dtype)
        for t in range(lo):
            for i in range(k):
                for ci in range(c_in):
                    xv = x[t + i, ci]
                    for co in range(c_out):
                        y[t, co] += xv * w[i, ci, co]
        return y

    @njit(cache=True)
    def _conv1d_backward_nb(x, w, gy):
        k, c_in, c_out = w.shape
        lo = gy.shape[0]
        gx = np.zeros_like(x)
        gw = np.zeros_like(w)
        for t in range(lo):
            for i in range(k):
                for ci in range(c_in):
                    acc = 0.0
                    xv = x[t + i, ci]
                    for co in range(c_out):
                        g = gy[t, co]
                        acc += g * w[i, ci, co]
                        gw[i, ci, co] += g * xv
                    gx[t + i, ci] += acc
        return gx, gw


def conv1d_forward(x, w):
    """Valid cross-correlation of ``x [L, c_in]`` with ``w [k, c_in, c_out]``."""
    if USE_NUMBA:
        return _conv1d_forward_nb(np.ascontiguousarray(x), np.ascontiguousarray(w))
    return _conv1d_forward_np(x, w)


def conv1d_backward(x, w, gy):
    """Gradients of the valid cross-correlation w.r.t. ``x`` and ``w``."""
    if USE_NUMBA:
        return _conv1d_backward_nb(
            np.ascontiguousarray(x), np.ascontiguousarray(w), np.ascontiguousarray(gy)
        )
    return _conv1d_backward_np(x, w, gy)
