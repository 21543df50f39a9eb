"""Time the batched minor kernel: numba JIT vs pure numpy.

Usage:
    python benchmarks/benchmark_kernels.py [--samples 200000] [--atoms 4] [--repeats 5]

The workload mirrors a Monte Carlo campaign: one fixed scene context, many
position sets. The JIT path is warmed up before timing so compilation is not
billed to the first repeat.
"""

import argparse
import time

import numpy as np

from resfluo import AtomParameters, rabi_for_ratio, steady_state
from resfluo.geometry import AXES, detector_in_plane
from resfluo.kernels import minor_batch_numba, minor_batch_numpy, scene_coefficients


def build_workload(samples: int, atoms: int, seed: int = 0):
    state = steady_state(AtomParameters(rabi=rabi_for_ratio(3.5)))
    ctx = scene_coefficients(
        atoms,
        state,
        np.asarray(AXES["x"]),
        np.asarray(AXES["z"]),
        np.asarray(AXES["y"]),
        detector_in_plane(np.pi / 4),
    )
    rng = np.random.default_rng(seed)
    positions = np.ascontiguousarray(rng.uniform(-10, 10, size=(samples, atoms, 3)))
    return positions, ctx


def time_fn(fn, positions, ctx, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(positions, *ctx)
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=200_000)
    ap.add_argument("--atoms", type=int, default=4)
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()

    positions, ctx = build_workload(args.samples, args.atoms)
    wd1, wd2, c0, c12, cs = ctx
    ctx = (wd1, wd2, float(c0), float(c12), float(cs))

    rows = []
    t_np = time_fn(minor_batch_numpy, positions, ctx, args.repeats)
    rows.append(("numpy", t_np))

    if minor_batch_numba is not None:
        minor_batch_numba(positions[:16], *ctx)  # warm the JIT cache
        t_nb = time_fn(minor_batch_numba, positions, ctx, args.repeats)
        rows.append(("numba", t_nb))
        # backends must tell the same story before their times mean anything
        a = minor_batch_numpy(positions[:1000], *ctx)
        b = minor_batch_numba(positions[:1000], *ctx)
        rel = np.max(np.abs(a - b) / np.maximum(np.abs(a), 1e-12))
        print(f"backend agreement (1000 samples): {rel:.2e} worst relative")
    else:
        print("numba not importable; timing numpy only")

    print(f"\n{args.samples} samples x {args.atoms} atoms, best of {args.repeats}:")
    for name, t in rows:
        print(f"  {name:6s} {t * 1e3:9.2f} ms   {args.samples / t / 1e6:7.2f} Msamples/s")
    if len(rows) == 2:
        print(f"  speedup numba/numpy: {rows[0][1] / rows[1][1]:.2f}x")


if __name__ == "__main__":
    main()
