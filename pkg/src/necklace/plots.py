"""Standalone matplotlib scripts for the CSV datasets written by the CLI."""
from __future__ import annotations

from pathlib import Path

KINDS = ("trace", "profile", "spacetime")

_HEAD = '''#!/usr/bin/env python3
"""Generated plot script; run it next to the CSV files it names."""
import csv
import sys

import matplotlib.pyplot as plt


def read(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))

'''

_TRACE = '''
PATHS = {paths!r}
MARKERS = {markers!r}
for path in PATHS:
    rows = read(path)
    lam = [float(r["lambda"]) for r in rows]
    tr = [float(r["trace"]) for r in rows]
    fig, ax = plt.subplots(figsize=(8, 4))
    ax.plot(lam, tr, color="k", lw=1)
    for level in (2.0, -2.0):
        ax.axhline(level, color="tab:red", lw=0.8, ls="--")
    inside = [(x, y) for x, y in MARKERS if min(lam) <= x <= max(lam)]
    if inside:
        ax.plot(*zip(*inside), "o", color="tab:green", ms=4, label="lambda_m")
        ax.legend()
    ax.set_ylim(-4, 4)
    ax.set_xlabel("lambda")
    ax.set_ylabel("tr M(lambda)")
    fig.tight_layout()
    fig.savefig(path.rsplit(".", 1)[0] + ".png", dpi=150)
if "--show" in sys.argv:
    plt.show()
'''

_PROFILE = '''
import math

PATHS = {paths!r}
fig, ax = plt.subplots(figsize=(8, 4))
lo, hi = math.inf, -math.inf
for path in PATHS:
    rows = read(path)
    x = [float(r["x"]) for r in rows]
    u = [float(r["u"]) for r in rows]
    lo, hi = min(lo, min(x)), max(hi, max(x))
    ax.plot(x, u, lw=1, label=path)
# vertices sit at multiples of pi
n = math.ceil(lo / math.pi)
while n * math.pi <= hi:
    ax.axvline(n * math.pi, color="0.85", lw=0.5, zorder=0)
    n += 1
ax.set_xlabel("x")
ax.set_ylabel("u")
ax.legend(fontsize="small")
fig.tight_layout()
fig.savefig(PATHS[0].rsplit(".", 1)[0] + ".png", dpi=150)
if "--show" in sys.argv:
    plt.show()
'''

_SPACETIME = '''
import numpy as np

PATHS = {paths!r}
for path in PATHS:
    rows = read(path)
    t = np.array([float(r["t"]) for r in rows])
    x = np.array([float(r["x"]) for r in rows])
    u = np.array([float(r["u"]) for r in rows])
    ts = np.unique(t)
    xs = np.unique(x)
    grid = u.reshape(ts.size, xs.size)
    fig, ax = plt.subplots(figsize=(8, 4))
    lim = np.abs(grid).max() or 1.0
    mesh = ax.pcolormesh(xs, ts, grid, cmap="RdBu_r", vmin=-lim, vmax=lim, shading="auto")
    fig.colorbar(mesh, ax=ax, label="u")
    ax.set_xlabel("x")
    ax.set_ylabel("t")
    fig.tight_layout()
    fig.savefig(path.rsplit(".", 1)[0] + ".png", dpi=150)
if "--show" in sys.argv:
    plt.show()
'''


def emit_plot_script(paths, kind: str, out=None, markers=()) -> Path:
    """Write a plotting script for ``paths``; returns the script path.

    ``markers`` are ``(lambda, trace)`` pairs drawn on the trace plot.
    """
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}")
    paths = [Path(p) for p in ([paths] if isinstance(paths, (str, Path)) else paths)]
    if not paths:
        raise ValueError("no datasets given")
    missing = [str(p) for p in paths if not p.is_file()]
    if missing:
        raise FileNotFoundError(f"missing dataset(s): {', '.join(missing)}")
    out = Path(out) if out else paths[0].with_name(f"plot_{kind}_{paths[0].stem}.py")
    names = [p.name if p.parent == out.parent else str(p) for p in paths]
    body = {"trace": _TRACE, "profile": _PROFILE, "spacetime": _SPACETIME}[kind]
    fmt = {"paths": names}
    if kind == "trace":
        fmt["markers"] = [(float(x), float(y)) for x, y in markers]
    out.write_text(_HEAD + body.format(**fmt), encoding="utf-8")
    return out
