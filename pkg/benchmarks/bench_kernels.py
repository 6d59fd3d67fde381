"""Benchmark the series inner loop: compiled extension vs NumPy fallback.

Times ``q_beta_values`` on a boundary-heavy point cloud (where the
series is longest) for each available backend, checks the two agree
bitwise, and prints one line per backend plus the speedup.

Run:  python3 benchmarks/bench_kernels.py [--points N] [--repeats K]
"""

import argparse
import time

import numpy as np

from bergman_lab.kernels import ball_kernel, q_beta_values
from bergman_lab.kernels._dispatch import (HAVE_COMPILED, backend_name,
                                           set_backend)


def make_cloud(count, seed=7):
    rng = np.random.default_rng(seed)
    q = 1.0 - 10.0 ** rng.uniform(-3.0, -0.3, count)  # pile up near 1
    t = rng.uniform(-1.0, 1.0, count)
    return np.ascontiguousarray(q), np.ascontiguousarray(t)


def bench(spec, q, t, repeats):
    best = np.inf
    for _ in range(repeats):
        start = time.perf_counter()
        vals, tail = q_beta_values(spec, q, t, tol=1e-12)
        best = min(best, time.perf_counter() - start)
    return best, vals, tail


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--points", type=int, default=4000)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    spec = ball_kernel(3, 2.0)
    q, t = make_cloud(args.points)
    original = backend_name()
    results = {}
    try:
        for name in (["python", "compiled"] if HAVE_COMPILED
                     else ["python"]):
            set_backend(name)
            results[name] = bench(spec, q, t, args.repeats)
            secs = results[name][0]
            print(f"{name:9s} {1e3 * secs:9.2f} ms   "
                  f"({args.points} points, best of {args.repeats})")
    finally:
        set_backend(original)

    if "compiled" in results:
        py_t, py_v, py_tail = results["python"]
        cy_t, cy_v, cy_tail = results["compiled"]
        same = np.array_equal(py_v, cy_v) and py_tail == cy_tail
        print(f"speedup   {py_t / cy_t:9.1f} x   "
              f"bitwise identical: {same}")
        if not same:
            raise SystemExit("backend outputs differ")
    else:
        print("compiled extension not built; python fallback only")


if __name__ == "__main__":
    main()
