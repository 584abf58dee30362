"""Benchmark the numba kernel backend against the pure-numpy fallback.

Runs the same multistart searches under both backends in subprocesses (the
backend is fixed at import time via PURITY_WITNESS_BACKEND) and prints the
timings plus the worst gap to the closed forms.

Usage: python benchmarks/bench_backends.py [--restarts N] [--grid N]
"""

import argparse
import json
import os
import subprocess
import sys

_WORKER = r"""
import json, sys, time
import numpy as np
from purity_witness import kernels
from purity_witness.optimizer import maximize_b1_qubit, maximize_b1_qudit_maxmixed

restarts, grid = int(sys.argv[1]), int(sys.argv[2])
maximize_b1_qubit(1.0, 1.0, restarts=1, seed=0)  # warm up / JIT compile

t0 = time.perf_counter()
worst = 0.0
for p in np.linspace(0.0, 1.0, grid):
    for w in np.linspace(0.0, 1.0, grid):
        rep = maximize_b1_qubit(float(p), float(w), restarts=restarts, seed=42)
        worst = max(worst, abs(rep.gap))
t_qubit = time.perf_counter() - t0

t0 = time.perf_counter()
for d in (4, 5):
    rep = maximize_b1_qudit_maxmixed(d, restarts=restarts, seed=42)
    worst = max(worst, abs(rep.gap))
t_qudit = time.perf_counter() - t0

print(json.dumps({
    "backend": kernels.BACKEND,
    "qubit_grid_seconds": t_qubit,
    "qudit_seconds": t_qudit,
    "worst_gap": worst,
}))
"""


def run(backend: str, restarts: int, grid: int) -> dict:
    env = dict(os.environ, PURITY_WITNESS_BACKEND=backend)
    out = subprocess.run(
        [sys.executable, "-c", _WORKER, str(restarts), str(grid)],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    return json.loads(out.stdout.strip().splitlines()[-1])


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--restarts", type=int, default=50)
    parser.add_argument("--grid", type=int, default=6)
    args = parser.parse_args()

    results = [run(b, args.restarts, args.grid) for b in ("numba", "numpy")]
    for res in results:
        print(
            f"{res['backend']:>6}: qubit {args.grid}x{args.grid} grid "
            f"{res['qubit_grid_seconds']:.2f}s, qudit {res['qudit_seconds']:.2f}s, "
            f"worst gap {res['worst_gap']:.2e}"
        )
    speedup = results[1]["qubit_grid_seconds"] / results[0]["qubit_grid_seconds"]
    print(f"numba speedup on the qubit grid: {speedup:.1f}x")


if __name__ == "__main__":
    main()
