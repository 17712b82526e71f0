#!/usr/bin/env python3
"""Compare the compiled kernels against the pure-Python fallback.

Times the raw kernels (CSR matvec, CSR/dense forward sweeps) and a full
Gauss-Seidel-Newton solve under each backend, printing one table row per
case. Run after building the extension:

    python benchmarks/compare_backends.py [--n 1000] [--density 0.003]
"""

import argparse
import time

import numpy as np

from pwlsolve import GenSpec, generate, solve, split_dlu, use_backend
from pwlsolve._kernels import available_backends


def best_of(fn, repeats=5):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=1000)
    parser.add_argument("--density", type=float, default=0.003)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    backends = available_backends()
    if backends == ("python",):
        print("compiled kernels unavailable; only the python backend will run")

    sparse = generate(GenSpec(n=args.n, kind="sparse", density=args.density, seed=args.seed))
    dense = generate(GenSpec(n=min(args.n, 1000), kind="dense", seed=args.seed))
    rng = np.random.default_rng(args.seed)
    x = rng.standard_normal(sparse.n)
    xd = rng.standard_normal(dense.n)

    sparse_split = split_dlu(sparse.T)
    dense_split = split_dlu(dense.T)
    diag_sparse = 1.0 + sparse_split.diag
    diag_dense = 1.0 + dense_split.diag

    from pwlsolve import matvec

    cases = {
        f"csr matvec (n={sparse.n}, nnz={sparse.T.nnz})": lambda: matvec(sparse.T, x),
        f"csr forward sweep (n={sparse.n})": lambda: sparse_split.lower_solve(diag_sparse, x),
        f"dense forward sweep (n={dense.n})": lambda: dense_split.lower_solve(diag_dense, xd),
        f"gs-newton solve (sparse n={sparse.n})": lambda: solve(sparse, "gs-newton"),
        f"gs-newton solve (dense n={dense.n})": lambda: solve(dense, "gs-newton"),
        f"jacobi-newton solve (sparse n={sparse.n})": lambda: solve(sparse, "jacobi-newton"),
    }

    results = {}
    for backend in backends:
        use_backend(backend)
        for label, fn in cases.items():
            fn()  # warm up
            results[(label, backend)] = best_of(fn)

    width = max(len(label) for label in cases)
    header = f"{'case':<{width}}  " + "".join(f"{b:>12}" for b in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for label in cases:
        row = f"{label:<{width}}  "
        for backend in backends:
            row += f"{results[(label, backend)] * 1e3:>10.3f}ms"
        if len(backends) == 2:
            ratio = results[(label, "python")] / results[(label, "native")]
            row += f"{ratio:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
