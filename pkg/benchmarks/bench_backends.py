#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-numpy fallback.

Runs each time-stepping kernel on the production-sized hydrogen grid and
reports steps/second per backend plus the speedup.  Also verifies that the
two backends produce bit-identical states, which is the contract that makes
the backend choice a pure performance knob.

Usage: python benchmarks/bench_backends.py [--grid 140x40000] [--repeat 3]
"""

import argparse
import time

import numpy as np

from plasmix import Profile, build_initial, hydrogen_mixture, reaction_matrix_example
from plasmix._backend import available_kernel_modules, mixture_scalars, reaction_scalars
from plasmix.steppers import ReactionEulerCoeffs

KERNELS = (
    ("pure-diffusion", "advance_pure_diffusion"),
    ("ab", "advance_ab"),
    ("aba-frozen", "advance_aba_frozen"),
    ("aba-updated", "advance_aba_updated"),
    ("iter2", "advance_picard"),
    ("iter3", "advance_picard"),
    ("nested-2x2", "advance_nested"),
)

ITER_ARGS = {
    "iter2": dict(iters=2),
    "iter3": dict(iters=3),
    "nested-2x2": dict(inner=2, outer=2),
}


def run_kernel(mod, name, func, grid_points, time_steps, repeat):
    initial = build_initial(Profile.UPHILL, grid_points)
    mix = mixture_scalars(hydrogen_mixture())
    rc = reaction_scalars(ReactionEulerCoeffs.from_matrix(reaction_matrix_example(1)))
    dt = 1.0 / time_steps
    best = float("inf")
    state = None
    for _ in range(repeat):
        xi1 = initial.xi1.copy()
        xi2 = initial.xi2.copy()
        n1 = np.empty_like(xi1)
        n2 = np.empty_like(xi2)
        mod.flux_update(xi1, xi2, n1, n2, mix, float(grid_points))
        kwargs = dict(iters=0, inner=1, outer=1)
        kwargs.update(ITER_ARGS.get(name, {}))
        tic = time.perf_counter()
        getattr(mod, func)(xi1, xi2, n1, n2, mix, rc, float(grid_points), dt, time_steps, **kwargs)
        best = min(best, time.perf_counter() - tic)
        state = (xi1, xi2)
    return best, state


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--grid", default="140x40000", help="JxN (default 140x40000)")
    parser.add_argument("--repeat", type=int, default=3, help="repetitions, best-of")
    args = parser.parse_args()
    grid_points, time_steps = (int(v) for v in args.grid.lower().split("x"))

    mods = available_kernel_modules()
    if "compiled" not in mods:
        print("compiled backend not built; showing python fallback only")

    print(f"grid {grid_points}x{time_steps}, best of {args.repeat}")
    header = f"{'kernel':15s}" + "".join(f"{name:>14s}" for name in mods) + f"{'speedup':>10s}"
    print(header)
    print("-" * len(header))
    for name, func in KERNELS:
        times = {}
        states = {}
        for bname, mod in mods.items():
            times[bname], states[bname] = run_kernel(
                mod, name, func, grid_points, time_steps, args.repeat
            )
        cells = "".join(f"{time_steps / times[b]:>12.0f}/s" for b in mods)
        if len(mods) == 2:
            speed = times["python"] / times["compiled"]
            identical = all(
                np.array_equal(states["python"][k], states["compiled"][k]) for k in range(2)
            )
            tag = "" if identical else "  MISMATCH!"
            print(f"{name:15s}{cells}{speed:>9.1f}x{tag}")
        else:
            print(f"{name:15s}{cells}")


if __name__ == "__main__":
    main()
