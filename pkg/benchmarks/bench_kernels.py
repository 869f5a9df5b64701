#!/usr/bin/env python3
"""Time the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat N] [--json out.json]

Both backends get identical inputs; the script also reports the largest
difference between their outputs.
"""
import argparse
import json
import math
import time

import numpy as np

from necklace import kernels
from necklace.geometry import Geometry, Layout


def shooting_case(n_cells=20):
    layout = Layout.build(Geometry(1), n_cells, math.pi / 200)
    i0 = layout.center_index("link_centered")
    nsteps = layout.n_nodes - 1 - i0
    steps, jumps = layout.segments(i0, nsteps, 1, True)
    h = np.full(steps.size, layout.dx)

    def run(backend):
        u = np.zeros(nsteps + 1)
        pl = np.zeros(nsteps + 1)
        pr = np.zeros(nsteps + 1)
        backend.integrate_segments(0.14, 0.0, 0.01, 1.0, h, steps, jumps, u, pl, pr, 0, 0.0)
        return u

    return f"integrate_segments ({nsteps} RK4 steps)", run


def leapfrog_case(n_cells=10, nsteps=200):
    layout = Layout.build(Geometry(1), n_cells, math.pi / 100)
    x = layout.x()
    v0 = 0.1 / np.cosh(0.1 * x)
    v0[0] = v0[-1] = 0.0
    w, inv_mass = layout.edge_weights(), 1.0 / layout.node_mass()

    def run(backend):
        u = np.zeros_like(v0)
        v = v0.copy()
        backend.leapfrog(u, v, w, inv_mass, 0.26, 0.25 * layout.dx, layout.dx, nsteps, 1)
        return u

    return f"leapfrog ({layout.n_nodes} nodes x {nsteps} steps)", run


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--json", help="write the results here")
    args = ap.parse_args()

    compiled = kernels._impl if kernels.BACKEND == "cython" else None
    if compiled is None:
        print("compiled extension not available; timing the fallback only")
    rows = []
    for name, run in (shooting_case(), leapfrog_case()):
        t_py, out_py = best_of(lambda: run(kernels._fallback), args.repeat)
        row = {"kernel": name, "python_s": t_py}
        if compiled is not None:
            t_c, out_c = best_of(lambda: run(compiled), args.repeat)
            row.update(cython_s=t_c, speedup=t_py / t_c, max_diff=float(np.max(np.abs(out_c - out_py))))
        rows.append(row)

    print(f"{'kernel':45s} {'python [s]':>11s} {'cython [s]':>11s} {'speedup':>9s} {'max diff':>10s}")
    for r in rows:
        if "cython_s" in r:
            print(f"{r['kernel']:45s} {r['python_s']:11.4f} {r['cython_s']:11.5f} "
                  f"{r['speedup']:9.1f} {r['max_diff']:10.2e}")
        else:
            print(f"{r['kernel']:45s} {r['python_s']:11.4f}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump({"backend": kernels.BACKEND, "results": rows}, fh, indent=2)


if __name__ == "__main__":
    main()
