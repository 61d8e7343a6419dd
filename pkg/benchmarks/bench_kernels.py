"""Timing comparison of the numba and pure-numpy conv1d kernels.

Run with: python3 benchmarks/bench_kernels.py
"""

import time

import numpy as np

from protbench import kernels


def _time(fn, *args, repeats=20):
    fn(*args)  # warm-up (includes any JIT compilation)
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def main():
    rng = np.random.default_rng(0)
    cases = [
        (64, 22, 32, 4),
        (256, 32, 64, 8),
        (1024, 64, 96, 12),
    ]
    print(f"numba available and enabled: {kernels.USE_NUMBA}")
    header = f"{'L':>6} {'c_in':>5} {'c_out':>5} {'k':>3} | {'numpy fwd':>10} {'numpy bwd':>10}"
    if kernels.USE_NUMBA:
        header += f" {'numba fwd':>10} {'numba bwd':>10} {'speedup':>8}"
    print(header)
    for L, c_in, c_out, k in cases:
        x = rng.standard_normal((L, c_in))
        w = rng.standard_normal((k, c_in, c_out))
        gy = rng.standard_normal((L - k + 1, c_out))
        np_f = _time(kernels._conv1d_forward_np, x, w)
        np_b = _time(kernels._conv1d_backward_np, x, w, gy)
        row = f"{L:>6} {c_in:>5} {c_out:>5} {k:>3} | {np_f*1e3:>9.3f}ms {np_b*1e3:>9.3f}ms"
        if kernels.USE_NUMBA:
            nb_f = _time(kernels._conv1d_forward_nb, x, w)
            nb_b = _time(kernels._conv1d_backward_nb, x, w, gy)
            y_np = kernels._conv1d_forward_np(x, w)
            y_nb = kernels._conv1d_forward_nb(x, w)
            assert np.allclose(y_np, y_nb, rtol=1e-10, atol=1e-12)
            row += (f" {nb_f*1e3:>9.3f}ms {nb_b*1e3:>9.3f}ms"
                    f" {(np_f + np_b) / (nb_f + nb_b):>7.2f}x")
        print(row)


if __name__ == "__main__":
    main()
