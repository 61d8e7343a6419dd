"""Numba and numpy convolution kernels must agree with each other and with a
naive triple-loop reference."""

import numpy as np
import pytest

from protbench import kernels


def naive_forward(x, w):
    k, c_in, c_out = w.shape
    lo = x.shape[0] - k + 1
    y = np.zeros((lo, c_out), dtype=x.dtype)
    for t in range(lo):
        for i in range(k):
            y[t] += x[t + i] @ w[i]
    return y


def cases():
    rng = np.random.default_rng(0)
    for L, c_in, c_out, k in [(5, 3, 2, 2), (16, 8, 4, 3), (40, 22, 32, 12)]:
        x = rng.normal(size=(L, c_in))
        w = rng.normal(size=(k, c_in, c_out))
        gy = rng.normal(size=(L - k + 1, c_out))
        yield x, w, gy


@pytest.mark.parametrize("case", list(cases()), ids=["small", "medium", "wide"])
def test_numpy_forward_matches_naive(case):
    x, w, _ = case
    np.testing.assert_allclose(
        kernels._conv1d_forward_np(x, w), naive_forward(x, w), rtol=1e-12
    )


@pytest.mark.parametrize("case", list(cases()), ids=["small", "medium", "wide"])
def test_numpy_backward_matches_finite_difference(case):
    x, w, gy = case
    gx, gw = kernels._conv1d_backward_np(x, w, gy)
    # objective f = sum(gy * forward(x, w)); check a sample of coordinates
    def f():
        return float((gy * kernels._conv1d_forward_np(x, w)).sum())

    rng = np.random.default_rng(1)
    h = 1e-6
    for arr, grad in ((x, gx), (w, gw)):
        flat = arr.reshape(-1)
        for c in rng.choice(flat.size, size=min(20, flat.size), replace=False):
            orig = flat[c]
            flat[c] = orig + h
            up = f()
            flat[c] = orig - h
            down = f()
            flat[c] = orig
            numeric = (up - down) / (2 * h)
            assert grad.reshape(-1)[c] == pytest.approx(numeric, abs=1e-5)


@pytest.mark.skipif(not kernels.USE_NUMBA, reason="numba disabled")
class TestNumbaAgreement:
    @pytest.mark.parametrize(
        "case", list(cases()), ids=["small", "medium", "wide"]
    )
    def test_forward(self, case):
        x, w, _ = case
        np.testing.assert_allclose(
            kernels._conv1d_forward_nb(x, w),
            kernels._conv1d_forward_np(x, w),
            rtol=1e-12,
        )

    @pytest.mark.parametrize(
        "case", list(cases()), ids=["small", "medium", "wide"]
    )
    def test_backward(self, case):
        x, w, gy = case
        gx_nb, gw_nb = kernels._conv1d_backward_nb(x, w, gy)
        gx_np, gw_np = kernels._conv1d_backward_np(x, w, gy)
        np.testing.assert_allclose(gx_nb, gx_np, rtol=1e-12)
        np.testing.assert_allclose(gw_nb, gw_np, rtol=1e-12)


def test_dispatch_functions_run():
    x, w, gy = next(iter(cases()))
    y = kernels.conv1d_forward(x, w)
    assert y.shape == gy.shape
    gx, gw = kernels.conv1d_backward(x, w, gy)
    assert gx.shape == x.shape and gw.shape == w.shape


def test_env_flag_selects_numpy_path():
    """PROTBENCH_NO_NUMBA=1 must flip the module to the numpy path."""
    import importlib
    import os
    import subprocess
    import sys

    code = (
        "import protbench.kernels as k; "
        "print(k.USE_NUMBA)"
    )
    env = dict(os.environ, PROTBENCH_NO_NUMBA="1")
    out = subprocess.run(
        [sys.executable, "-c", code], env=env, capture_output=True, text=True
    )
    assert out.stdout.strip() == "False"
