"""Compare the compiled and numpy leapfrog kernels.

    python3 benchmarks/bench_kernels.py [--nx 2000] [--steps 2000]
"""

import argparse
import time

import numpy as np

from telegraph import kernels


def bench_step(mod, nx, steps):
    rng = np.random.default_rng(0)
    prev, cur = rng.normal(size=nx + 1), rng.normal(size=nx + 1)
    src = np.zeros(nx + 1)
    out = np.empty_like(cur)
    start = time.perf_counter()
    for _ in range(steps):
        mod.leapfrog_step(prev, cur, src, 0.81, True, 0.0, True, out)
        prev, cur, out = cur, out, prev
    return time.perf_counter() - start


def bench_energy(mod, nx, steps):
    rng = np.random.default_rng(1)
    a, b = rng.normal(size=nx + 1), rng.normal(size=nx + 1)
    start = time.perf_counter()
    for _ in range(steps):
        mod.quadratic_energy(a, b, 1e-3, 1e-3, 1.0)
    return time.perf_counter() - start


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--nx", type=int, nargs="+", default=[100, 1000, 10000])
    ap.add_argument("--steps", type=int, default=2000)
    args = ap.parse_args()
    found = kernels.backends()
    print(f"default backend: {kernels.BACKEND}; available: {', '.join(sorted(found))}")
    print(f"{'kernel':<10}{'nx':>8}" + "".join(f"{name + ' us/call':>18}" for name in sorted(found))
          + ("  speedup" if len(found) > 1 else ""))
    for label, fn in (("step", bench_step), ("energy", bench_energy)):
        for nx in args.nx:
            t = {name: fn(mod, nx, args.steps) / args.steps * 1e6 for name, mod in sorted(found.items())}
            row = f"{label:<10}{nx:>8}" + "".join(f"{t[name]:>18.2f}" for name in sorted(found))
            if "cython" in t:
                row += f"  {t['python'] / t['cython']:6.1f}x"
            print(row)


if __name__ == "__main__":
    main()
