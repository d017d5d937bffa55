#!/usr/bin/env python3
"""Time the numba kernels against the pure-numpy fallback.

Kernel timings run both implementations in-process. The end-to-end timing
launches one solver per backend in a subprocess with SEQFORGE_BACKEND set,
since the backend is fixed at import.

    python benchmarks/bench_kernels.py --L 36 --N 100 --n-samples 1024
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from seqforge import SubcarrierAssignment, build_papr_probes
from seqforge import _kernels_numba as nb
from seqforge import _kernels_numpy as npk
from seqforge.model import random_unit_rows


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


SOLVER_SNIPPET = """
import sys, time
from seqforge import SolverConfig, SubcarrierAssignment, kernels
from seqforge.solver import run
L, N, NS, it = map(int, sys.argv[1:5])
thr = float(sys.argv[5])
cfg = SolverConfig(L=L, N=N, papr_threshold=thr, max_iterations=it, stall_limit=10**9,
                   assignment=SubcarrierAssignment.contiguous(L, n_samples=NS), rng_seed=0)
run(SolverConfig(L=L, N=N, max_iterations=1))  # warm-up / JIT
t0 = time.perf_counter()
best, rep = run(cfg)
print(kernels.BACKEND, time.perf_counter() - t0, rep.final_metrics["coherence"])
"""


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--L", type=int, default=36)
    ap.add_argument("--N", type=int, default=100)
    ap.add_argument("--n-samples", type=int, default=1024)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--iterations", type=int, default=200)
    ap.add_argument("--papr-threshold", type=float, default=4.0)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    p = np.ascontiguousarray(random_unit_rows(rng, args.N, args.L))
    w = np.ascontiguousarray(
        build_papr_probes(SubcarrierAssignment.contiguous(args.L, n_samples=args.n_samples)).probes
    )
    reach = np.sqrt(2 * (1 - np.sqrt(args.papr_threshold / args.L)))
    cases = {
        "gram": lambda k: k.gram(p),
        "sequence_displacement": lambda k: k.sequence_displacement(p, 1.2, 1e-7),
        "probe_correlations": lambda k: k.probe_correlations(p, w),
        "papr_displacement": lambda k: k.papr_displacement(p, w, reach, 1e-7),
    }
    for fn in cases.values():
        fn(nb)  # compile

    print(f"L={args.L} N={args.N} N_S={args.n_samples}  (best of {args.repeat})")
    print(f"{'kernel':<24}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>10}")
    for name, fn in cases.items():
        t_np = best_of(lambda: fn(npk), args.repeat)
        t_nb = best_of(lambda: fn(nb), args.repeat)
        print(f"{name:<24}{1e3 * t_np:>12.3f}{1e3 * t_nb:>12.3f}{t_np / t_nb:>10.2f}")

    print(f"\nsolver, {args.iterations} iterations, PAPR threshold {args.papr_threshold}")
    for backend in ("numpy", "numba"):
        env = dict(os.environ, SEQFORGE_BACKEND=backend)
        out = subprocess.run(
            [sys.executable, "-c", SOLVER_SNIPPET, str(args.L), str(args.N),
             str(args.n_samples), str(args.iterations), str(args.papr_threshold)],
            env=env, capture_output=True, text=True, check=True,
        ).stdout.split()
        print(f"{out[0]:<8} {float(out[1]):8.2f} s   final coherence {float(out[2]):.6f}")


if __name__ == "__main__":
    main()
