"""Benchmark the compiled Jacobi kernel against the pure-Python fallback.

Usage: python benchmarks/bench_eigh.py [--reps 200]

Times eigenvalue extraction for random Hermitian matrices at the dimensions
the package actually hits (effects and states up to a few dozen), plus one
end-to-end number: PPT checks over a Werner-derivative grid.
"""

from __future__ import annotations

import argparse
import math
import time

import numpy as np

from steerkit import _jacobi_py

try:
    from steerkit import _jacobi as _compiled
except ImportError:
    _compiled = None


def _random_hermitians(d: int, count: int, rng: np.random.Generator) -> list[np.ndarray]:
    out = []
    for _ in range(count):
        g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        out.append(np.ascontiguousarray((g + g.conj().T) / 2))
    return out


def _time_kernel(kernel, mats) -> float:
    start = time.perf_counter()
    for m in mats:
        kernel.jacobi_eigenvalues(m.copy(), 1e-14, 100)
    return time.perf_counter() - start


def bench_kernels(reps: int) -> None:
    rng = np.random.default_rng(0)
    print(f"{'dim':>4} {'python (ms)':>14} {'compiled (ms)':>14} {'speedup':>9}")
    for d in (2, 4, 8, 16, 32):
        mats = _random_hermitians(d, reps, rng)
        t_py = _time_kernel(_jacobi_py, mats) / reps * 1e3
        if _compiled is None:
            print(f"{d:>4} {t_py:>14.4f} {'n/a':>14} {'n/a':>9}")
            continue
        t_cy = _time_kernel(_compiled, mats) / reps * 1e3
        # same eigenvalues up to round-off
        check = np.abs(
            _compiled.jacobi_eigenvalues(mats[0].copy(), 1e-14, 100)
            - _jacobi_py.jacobi_eigenvalues(mats[0].copy(), 1e-14, 100)
        ).max()
        assert check < 1e-12, f"kernels disagree by {check:.2e} at d={d}"
        print(f"{d:>4} {t_py:>14.4f} {t_cy:>14.4f} {t_py / t_cy:>8.1f}x")


def bench_ppt_sweep() -> None:
    from steerkit.oracle import is_npt
    from steerkit.states import werner_derivative

    grid = [
        werner_derivative(p, th)
        for p in np.linspace(0, 1, 40)
        for th in np.linspace(0, math.pi / 4, 40)
    ]
    start = time.perf_counter()
    flagged = sum(is_npt(rho) for rho in grid)
    elapsed = time.perf_counter() - start
    lane = "compiled" if _compiled is not None else "pure-python"
    print(f"\nPPT sweep over {len(grid)} states ({lane} lane active): "
          f"{elapsed * 1e3:.1f} ms, {flagged} NPT")


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--reps", type=int, default=200)
    args = parser.parse_args()
    if _compiled is None:
        print("compiled kernel not importable; timing fallback only\n")
    bench_kernels(args.reps)
    bench_ppt_sweep()
