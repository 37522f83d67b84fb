"""Benchmark the Sturm-bisection eigensolver: numba kernel vs numpy fallback.

Run:  python benchmarks/bench_sturm.py

The workload mirrors the verify command: the discretized oscillator
Hamiltonian on the default grid, lowest-8 eigenvalues.  The numba path is
warmed once so JIT compilation does not pollute the timings.
"""

import time

import numpy as np

from isospec import assemble_hamiltonian, build_oscillator_basis, make_grid
from isospec.kernels import numba_available
from isospec.numerics import lowest_eigenvalues
from isospec.verify import base_potential


def _time(fn, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t0)
    return best, result


def main():
    rows = []
    for n_points in (2001, 4001, 8001):
        grid = make_grid(-12.0, 12.0, n_points)
        basis = build_oscillator_basis(grid, 8)
        T = assemble_hamiltonian(base_potential(basis))

        t_numpy, v_numpy = _time(lambda: lowest_eigenvalues(T, 8, backend="numpy"))
        if numba_available():
            lowest_eigenvalues(T, 8, backend="numba")  # warm the JIT
            t_numba, v_numba = _time(lambda: lowest_eigenvalues(T, 8, backend="numba"))
            assert np.array_equal(v_numba, v_numpy), "backends disagree"
            rows.append((n_points, t_numpy, t_numba, t_numpy / t_numba))
        else:
            rows.append((n_points, t_numpy, float("nan"), float("nan")))

    print(f"{'n_points':>8}  {'numpy [s]':>10}  {'numba [s]':>10}  {'speedup':>8}")
    for n_points, t_np, t_nb, speedup in rows:
        print(f"{n_points:>8}  {t_np:>10.4f}  {t_nb:>10.4f}  {speedup:>8.1f}")
    if not numba_available():
        print("numba not importable; only the numpy fallback was timed")


if __name__ == "__main__":
    main()
