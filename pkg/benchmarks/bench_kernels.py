"""Compare the compiled and numpy kernel backends.

    python benchmarks/bench_kernels.py [--repeat N]

Micro-benchmarks call both kernel modules directly. The end-to-end rows run
the same attack in a subprocess per backend (``OCCAM_PURE`` picks the numpy
path) so that import-time selection is exercised as in real use.
"""
import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from occam import _pykernels

try:
    from occam import _ckernels
except ImportError:
    _ckernels = None

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))

END_TO_END = """
import sys, time
sys.path.insert(0, {tests!r})
from helpers import ball_problem, ball_objective
from occam import AttackConfig, AudioVector, BACKEND, run_occam
x, t, r, s, _ = ball_problem({n}, 0)
t0 = time.perf_counter()
res = run_occam(AttackConfig(total_queries={T}, seed=0), ball_objective(x, t, r), AudioVector(x), AudioVector(s))
print(BACKEND, time.perf_counter() - t0, res.final_distance)
"""


def _micro(mod, s, repeat):
    rng = np.random.default_rng(0)
    xs, x, z = rng.uniform(-1, 1, s), rng.uniform(-1, 1, s), rng.normal(0, 0.01, s)
    out = np.empty(s)
    path, cov = np.zeros(s), np.ones(s)
    idx = rng.permutation(s * 4)[:s].astype(np.intp)
    big = rng.normal(size=s * 4)
    number = max(1, 200_000 // s)

    def best(fn):
        return min(timeit.repeat(fn, number=number, repeat=repeat)) / number * 1e6

    return {
        "offspring": best(lambda: mod.biased_offspring(xs, x, z, 0.08, out)),
        "evolution": best(lambda: mod.evolution_update(path, cov, z, 0.01, 0.01, 0.001)),
        "gather": best(lambda: mod.gather(big, idx, out)),
        "scatter": best(lambda: mod.scatter(big, idx, out)),
    }


def _end_to_end(n, T, pure):
    code = END_TO_END.format(tests=os.path.join(ROOT, "tests"), n=n, T=T)
    env = {**os.environ, "OCCAM_PURE": "1" if pure else "0"}
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    backend, secs, dist = out.stdout.split()
    return backend, float(secs), float(dist)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    if _ckernels is None:
        print("compiled kernels are not built; only the numpy backend is available")
    print("micro-benchmarks (microseconds per call, best of %d)" % args.repeat)
    print(f"{'s':>7} {'kernel':>10} {'numpy':>10} {'cython':>10} {'speedup':>8}")
    for s in (8, 64, 512, 4096, 16000):
        py = _micro(_pykernels, s, args.repeat)
        cy = _micro(_ckernels, s, args.repeat) if _ckernels else {}
        for k, v in py.items():
            c = cy.get(k)
            extra = f"{c:10.2f} {v / c:8.2f}" if c else f"{'-':>10} {'-':>8}"
            print(f"{s:7d} {k:>10} {v:10.2f} {extra}")

    print()
    print("end to end run_occam (seconds)")
    print(f"{'n':>7} {'T':>7} {'numpy':>9} {'cython':>9} {'speedup':>8} {'same result':>12}")
    for n, T in ((200, 10_000), (1000, 10_000), (16_000, 5_000)):
        _, t_py, d_py = _end_to_end(n, T, pure=True)
        if _ckernels is None:
            print(f"{n:7d} {T:7d} {t_py:9.2f} {'-':>9} {'-':>8} {'-':>12}")
            continue
        backend, t_cy, d_cy = _end_to_end(n, T, pure=False)
        assert backend == "cython"
        same = "yes" if abs(d_py - d_cy) <= 1e-9 * d_py else "no"
        print(f"{n:7d} {T:7d} {t_py:9.2f} {t_cy:9.2f} {t_py / t_cy:8.2f} {same:>12}")


if __name__ == "__main__":
    main()
