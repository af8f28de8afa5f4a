"""Compare the numba and numpy simplex kernels.

Each backend runs in its own interpreter because the choice is fixed at
import time by POLYLYAP_BACKEND. Usage::

    python benchmarks/bench_simplex.py [--repeat 5]
"""
import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, time
import numpy as np
from polylyap import _backend
from polylyap.contraction import solve_gap
from polylyap.plants import motor_speed_model
from polylyap.polytope import random_init
from polylyap.simplex import StandardFormLP, solve

repeat = int(sys.argv[1])
rng = np.random.default_rng(0)
lps = []
for _ in range(200):
    k, l = 8, 20
    a = rng.standard_normal((k, l))
    a[0] = rng.uniform(0.1, 1.0, l)
    lps.append(StandardFormLP(a, a @ rng.uniform(0, 1, l), rng.standard_normal(l)))
model = motor_speed_model(6.0)
polys = [random_init(2, 6, s) for s in range(10)]

# Warm-up triggers (cached) compilation outside the timed region.
solve(lps[0])
solve_gap(polys[0], model)

def best(fn):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)

out = {
    "backend": _backend.BACKEND,
    "random_lp_8x20_x200": best(lambda: [solve(lp) for lp in lps]),
    "gap_lp_speed_hull_x10": best(lambda: [solve_gap(p, model) for p in polys]),
}
print(json.dumps(out))
"""


def run(backend, repeat):
    env = dict(os.environ, POLYLYAP_BACKEND=backend)
    res = subprocess.run([sys.executable, "-c", WORKER, str(repeat)], env=env, capture_output=True, text=True, check=True)
    return json.loads(res.stdout.strip().splitlines()[-1])


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args()
    rows = [run(b, args.repeat) for b in ("numba", "numpy")]
    keys = [k for k in rows[0] if k != "backend"]
    print(f"{'case':<26}" + "".join(f"{r['backend']:>12}" for r in rows) + f"{'speedup':>10}")
    for k in keys:
        t = [r[k] for r in rows]
        print(f"{k:<26}" + "".join(f"{x:>11.4f}s" for x in t) + f"{t[1] / t[0]:>9.2f}x")


if __name__ == "__main__":
    main()
