"""Time the rotation kernel: compiled sweep against the numpy fallback.

    python3 benchmarks/bench_rotation.py [--rows 2000] [--vars 200] [--k 6] [--repeat 5]

Rows are columns of Z (numeric variables plus levels); every variable owns
``rows / vars`` of them.
"""
import argparse
import time

import numpy as np

from mixfactor import _kernels


def make_inputs(rows, n_vars, k, seed=0):
    rng = np.random.default_rng(seed)
    col_var = np.sort(np.arange(rows) % n_vars).astype(np.intp)
    A = np.ascontiguousarray(rng.standard_normal((rows, k)) / np.sqrt(rows))
    return A, col_var


def time_backend(kern, A, col_var, p, sweeps, repeat):
    best = np.inf
    for _ in range(repeat):
        A_w, T = A.copy(), np.eye(A.shape[1])
        t0 = time.perf_counter()
        for _ in range(sweeps):
            kern.sweep(A_w, T, col_var, p)
        best = min(best, time.perf_counter() - t0)
    return best, A_w, T


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--rows", type=int, default=2000)
    ap.add_argument("--vars", type=int, default=200)
    ap.add_argument("--k", type=int, default=6)
    ap.add_argument("--sweeps", type=int, default=10)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    A, col_var = make_inputs(args.rows, args.vars, args.k)
    results = {}
    for name, kern in sorted(_kernels.BACKENDS.items()):
        results[name] = time_backend(kern, A, col_var, args.vars, args.sweeps, args.repeat)
        print(f"{name:>7}: {results[name][0] * 1e3:9.2f} ms for {args.sweeps} sweeps "
              f"({args.rows} rows, {args.vars} variables, k={args.k})")
    if "cython" in results:
        py, cy = results["python"], results["cython"]
        print(f"speedup: {py[0] / cy[0]:.1f}x; max |T_py - T_cy| = {np.abs(py[2] - cy[2]).max():.1e}")
    else:
        print("compiled kernel not built; only the fallback was timed")


if __name__ == "__main__":
    main()
