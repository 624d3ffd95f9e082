"""Compiled loops vs numpy fallback for the three hot kernels.

    python benchmarks/bench_kernels.py [--repeat 5]

Both formulations are importable side by side, so one process times both.
Compilation happens in a warm-up call that is not timed.
"""
import argparse
import time

import numpy as np

from kminerr import _kernels as K
from kminerr.problems import gen_random, ray_geometry
from kminerr.system import build_projectors, partition_uniform


def best_of(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases():
    rng = np.random.default_rng(0)
    G = rng.standard_normal((60, 60))
    S = G @ G.T
    yield "jacobi 60x60", (lambda: K.jacobi_eig_loops(S, K.MAX_SWEEPS)), \
        (lambda: K.jacobi_eig_numpy(S, K.MAX_SWEEPS))

    A, b, _ = gen_random(600, 200, seed=1)
    for bs in (1, 20):
        P = build_projectors(partition_uniform(A, b, bs))
        args = (P.system.A, P.system.b, P.starts, P.Qflat, P.qoffs, P.invlam, np.zeros(P.n))
        yield f"cycle 600x200 block {bs}", (lambda a=args: K.cycle_loops(*a, False)), \
            (lambda a=args: K.cycle_numpy(*a, False))

    th, off = ray_geometry(32, 45, 46)
    yield "trace_rays N=32 45x46", (lambda: K.trace_rays_loops(32, th, off)), \
        (lambda: K.trace_rays_numpy(32, th, off))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if not K.HAS_NUMBA:
        print("numba unavailable or disabled; both columns time the numpy path")
    print(f"{'kernel':<28}{'loops [ms]':>12}{'numpy [ms]':>12}{'speedup':>10}")
    for name, loops, vec in cases():
        tl = best_of(loops, args.repeat)
        tv = best_of(vec, args.repeat)
        print(f"{name:<28}{tl * 1e3:>12.3f}{tv * 1e3:>12.3f}{tv / tl:>10.1f}")


if __name__ == "__main__":
    main()
