"""Command-line front end.

Every subcommand writes its results into the output directory (``--out``,
else ``$NECKLACE_OUT``, else the working directory) and prints a short
summary.  Exit codes: 0 success, 2 usage error, 3 numerical failure, 4 an
invalid verdict from ``validate-freq --strict``.
"""
from __future__ import annotations

import argparse
import json
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields, replace
from fractions import Fraction
from pathlib import Path

from . import io
from .errors import BracketError, ConfigurationError, ConvergenceError, SimulationError
from .geometry import DEFAULT_DX, Geometry
from .plots import emit_plot_script

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL, EXIT_INVALID = 0, 2, 3, 4

BREATHER_COMMANDS = ("breather", "modes", "simulate")
VALIDITY_HINT = "see `necklace validate-freq` for which (k, l) carry breathers"


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    k: int = 1
    l: str = "1"
    eps: tuple[float, ...] = (0.05,)
    mmax: int | None = None
    family: str = "link"
    dx: float = DEFAULT_DX
    dt: float | None = None
    cells: int | None = None
    periods: int = 1
    lmin: float = -1.0
    lmax: float = 40.0
    n: int = 2001
    out: str | None = None
    jobs: int = 1
    strict: bool = False
    plot: bool = False
    snapshots: bool = False
    inputs: tuple[str, ...] = ()

    @property
    def l_int(self) -> int:
        return int(self.l)


def _bool(text: str) -> bool:
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in str(text).replace(",", " ").split())


CONFIG_TYPES = {
    "k": int,
    "l": str,
    "eps": _floats,
    "mmax": int,
    "family": str,
    "dx": float,
    "dt": float,
    "cells": int,
    "periods": int,
    "lmin": float,
    "lmax": float,
    "n": int,
    "out": str,
    "jobs": int,
    "strict": _bool,
    "plot": _bool,
    "snapshots": _bool,
}


def read_config_file(path) -> dict:
    """Flat ``key = value`` file; ``#`` starts a comment."""
    values = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in CONFIG_TYPES:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            values[key] = CONFIG_TYPES[key](value)
        except ValueError as exc:
            raise UsageError(f"{path}:{lineno}: bad value for {key}: {exc}") from None
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="necklace", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="subcommand", required=True)
    S = argparse.SUPPRESS

    def common(p):
        p.add_argument("--config", help="key = value file; flags override it")
        p.add_argument("--out", default=S, help="output directory")
        return p

    p = common(sub.add_parser("bands", help="scan tr M(lambda) into bands and gaps"))
    p.add_argument("--l", type=str, default=S)
    p.add_argument("--k", type=int, default=S, help="mark lambda_m for this k on the plot")
    p.add_argument("--lmin", type=float, default=S)
    p.add_argument("--lmax", type=float, default=S)
    p.add_argument("--n", type=int, default=S)
    p.add_argument("--plot", action="store_true", default=S)

    p = common(sub.add_parser("validate-freq", help="check the breather frequency rule"))
    p.add_argument("--k", type=int, default=S)
    p.add_argument("--l", type=str, default=S)
    p.add_argument("--mmax", type=int, default=S)
    p.add_argument("--strict", action="store_true", default=S, help="exit 4 on an invalid verdict")

    p = common(sub.add_parser("rationality", help="is (L - pi)/(L + pi) rational"))
    p.add_argument("--l", type=str, default=S)

    for name, helptext in (
        ("breather", "bound state by shooting"),
        ("modes", "truncated coupled-mode solve"),
        ("simulate", "time-domain breather check"),
    ):
        p = common(sub.add_parser(name, help=helptext))
        p.add_argument("--k", type=int, default=S)
        p.add_argument("--l", type=str, default=S)
        p.add_argument("--eps", type=float, nargs="+", default=S)
        p.add_argument("--dx", type=float, default=S)
        p.add_argument("--cells", type=int, default=S)
        p.add_argument("--jobs", type=int, default=S, help="parallel workers over the eps list")
        p.add_argument("--plot", action="store_true", default=S)
        if name == "breather":
            p.add_argument("--family", choices=("link", "circle"), default=S)
        else:
            p.add_argument("--mmax", type=int, default=S)
        if name == "simulate":
            p.add_argument("--periods", type=int, default=S)
            p.add_argument("--dt", type=float, default=S)
            p.add_argument("--snapshots", action="store_true", default=S)

    p = common(sub.add_parser("report", help="merge JSON outputs into one summary"))
    p.add_argument("inputs", nargs="*", default=S, help="JSON files (default: all in --out)")
    return parser


def parse_config(argv=None) -> RunConfig:
    ns = vars(build_parser().parse_args(argv))
    sub = ns.pop("subcommand")
    config_path = ns.pop("config", None)
    values = read_config_file(config_path) if config_path else {}
    if "eps" in ns:
        ns["eps"] = tuple(ns["eps"])
    if "inputs" in ns:
        ns["inputs"] = tuple(ns["inputs"])
    values.update(ns)
    known = {f.name for f in fields(RunConfig)}
    cfg = RunConfig(sub, **{k: v for k, v in values.items() if k in known})
    if cfg.mmax is None:
        cfg = replace(cfg, mmax=99 if sub == "validate-freq" else 5)
    return validate_config(cfg)


def validate_config(cfg: RunConfig) -> RunConfig:
    sub = cfg.subcommand
    if sub in ("bands", "validate-freq", *BREATHER_COMMANDS):
        try:
            l = int(cfg.l)
        except ValueError:
            raise UsageError(f"l must be a positive integer for {sub}, got {cfg.l!r}") from None
        if l < 1:
            raise UsageError("l must be a positive integer")
    if sub in ("validate-freq", *BREATHER_COMMANDS) and (cfg.k < 1 or cfg.k % 2 == 0):
        raise UsageError(f"k must be odd (got {cfg.k}); {VALIDITY_HINT}")
    if sub in BREATHER_COMMANDS:
        if cfg.l_int % 2 == 0:
            raise UsageError(f"l must be odd for breathers (got {cfg.l}); {VALIDITY_HINT}")
        if not cfg.eps or any(not 0 < e <= 0.5 for e in cfg.eps):
            raise UsageError("eps must lie in (0, 0.5]")
    if sub in ("validate-freq", "modes", "simulate") and (cfg.mmax < 1 or cfg.mmax % 2 == 0):
        raise UsageError("mmax must be odd")
    if sub == "validate-freq" and cfg.mmax < 3:
        raise UsageError("mmax must be at least 3 for validate-freq")
    if sub == "bands" and not cfg.lmin < cfg.lmax:
        raise UsageError("need lmin < lmax")
    if cfg.dx <= 0 or (cfg.dt is not None and cfg.dt <= 0):
        raise UsageError("dx and dt must be positive")
    if cfg.jobs < 1 or cfg.periods < 1 or cfg.n < 2:
        raise UsageError("jobs and periods must be >= 1 and n >= 2")
    if cfg.family not in ("link", "circle"):
        raise UsageError("family must be link or circle")
    return cfg


def _tag(eps: float) -> str:
    return f"{eps:g}"


# subcommand bodies; each returns (exit code, summary dict)


def run_bands(cfg: RunConfig, out: Path):
    from .floquet import trace_of_lambda
    from .spectrum import scan_bands

    geometry = Geometry(cfg.l_int)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        scan = scan_bands(geometry, cfg.lmin, cfg.lmax, cfg.n)
    csv_path = scan.to_csv(out / f"bands_l{cfg.l}.csv")
    summary = {
        "l": cfg.l_int,
        "lmin": cfg.lmin,
        "lmax": cfg.lmax,
        "n": cfg.n,
        "edges": scan.edges,
        "touches": scan.touches,
        "bands": [list(b) for b in scan.bands],
        "gaps": [[a, b, kind] for a, b, kind in scan.gaps],
        "warnings": scan.warnings,
    }
    io.write_json(out / f"bands_l{cfg.l}.json", summary)
    if cfg.plot:
        omega = cfg.k / 2.0
        lams = [(m * m - 1) * omega * omega for m in range(1, 200, 2)]
        markers = [(lam, trace_of_lambda(lam, geometry)) for lam in lams if lam <= cfg.lmax]
        emit_plot_script([csv_path], "trace", markers=markers)
    print(f"{len(scan.bands)} bands, {len(scan.gaps)} gaps in [{cfg.lmin:g}, {cfg.lmax:g}] -> {csv_path}")
    return EXIT_OK, summary


def run_validate(cfg: RunConfig, out: Path):
    from .spectrum import validate_frequency

    report = validate_frequency(cfg.k, cfg.l_int, cfg.mmax)
    data = report.to_dict()
    io.write_json(out / f"validate_k{cfg.k}_l{cfg.l}.json", data)
    print(f"k={cfg.k} l={cfg.l}: {report.verdict}")
    code = EXIT_INVALID if cfg.strict and not report.valid else EXIT_OK
    return code, data


def run_rationality(cfg: RunConfig, out: Path):
    from .spectrum import rationality_check

    try:
        value = Fraction(cfg.l)
    except ValueError:
        value = cfg.l
    data = rationality_check(value)
    name = "".join(c if c.isalnum() else "_" for c in cfg.l)
    io.write_json(out / f"rationality_{name}.json", data)
    print(json.dumps(data))
    return EXIT_OK, data


def _breather_job(cfg: RunConfig, eps: float, out: Path) -> dict:
    from .homoclinic import find_bound_state

    state = find_bound_state(eps, cfg.family, cfg.k, cfg.l_int, cfg.cells, cfg.dx)
    stem = f"breather_{cfg.family}_eps{_tag(eps)}"
    state.profile.to_csv(out / f"{stem}.csv")
    summary = state.summary()
    io.write_json(out / f"{stem}.json", summary)
    if cfg.plot:
        emit_plot_script([out / f"{stem}.csv"], "profile")
    return summary


def _modes_job(cfg: RunConfig, eps: float, out: Path) -> dict:
    from .modes import solve_bvp

    stack = solve_bvp(eps, cfg.k, cfg.l_int, cfg.mmax, cfg.cells, cfg.dx)
    paths = []
    for m in stack.indices:
        path = out / f"modes_eps{_tag(eps)}_u{m}.csv"
        stack.profile(m).to_csv(path)
        paths.append(path)
    res = stack.residual()
    summary = {
        "eps": eps,
        "k": cfg.k,
        "l": cfg.l_int,
        "m_max": cfg.mmax,
        "sup_norms": {f"u{m}": v for m, v in stack.sup_norms().items()},
        "residual_sup": res.sup,
        "newton_history": stack.info["newton_history"],
        "edge_ratio": stack.info["edge_ratio"],
    }
    io.write_json(out / f"modes_eps{_tag(eps)}.json", summary)
    if cfg.plot:
        emit_plot_script(paths, "profile")
    return summary


def _simulate_job(cfg: RunConfig, eps: float, out: Path) -> dict:
    from .modes import solve_bvp
    from .simulate import run_breather

    stack = solve_bvp(eps, cfg.k, cfg.l_int, cfg.mmax, cfg.cells, cfg.dx)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        diag = run_breather(stack, cfg.dt, cfg.periods, snapshots=cfg.snapshots)
    summary = {"eps": eps, "k": cfg.k, "l": cfg.l_int, "m_max": cfg.mmax, **diag.to_dict()}
    stem = f"simulate_eps{_tag(eps)}"
    io.write_json(out / f"{stem}.json", summary)
    if cfg.snapshots:
        from .geometry import Layout

        lay = stack.layout
        x = Layout(lay.geometry, lay.n_cells + 2, lay.n_link, lay.n_semi, lay.dx).x()
        rows = ((t, xi, ui) for t, u in diag.snapshots for xi, ui in zip(x, u))
        path = io.write_rows(out / f"{stem}_spacetime.csv", "t,x,u", rows)
        if cfg.plot:
            emit_plot_script([path], "spacetime")
    return summary


JOBS = {"breather": _breather_job, "modes": _modes_job, "simulate": _simulate_job}


def run_sweep(cfg: RunConfig, out: Path):
    job = JOBS[cfg.subcommand]
    if cfg.jobs > 1 and len(cfg.eps) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(job, [cfg] * len(cfg.eps), cfg.eps, [out] * len(cfg.eps)))
    else:
        results = [job(cfg, eps, out) for eps in cfg.eps]
    summary = {"subcommand": cfg.subcommand, "runs": results}
    if cfg.subcommand == "modes" and len(results) >= 2:
        import numpy as np

        n1 = np.log([r["sup_norms"]["u1"] for r in results])
        slopes = {}
        for key in results[0]["sup_norms"]:
            if key != "u1":
                slopes[f"slope_{key}"] = float(np.polyfit(n1, np.log([r["sup_norms"][key] for r in results]), 1)[0])
        summary["slopes"] = slopes
        io.write_json(out / "modes_slaving.json", summary)
    for r in results:
        keys = ("amplitude", "max_u", "beta_hat") if cfg.subcommand == "breather" else ()
        if cfg.subcommand == "modes":
            keys = ("residual_sup",)
        if cfg.subcommand == "simulate":
            keys = ("energy_drift",)
        extra = " ".join(f"{k}={r[k]:.6g}" for k in keys)
        if cfg.subcommand == "simulate":
            extra += f" rho={r['rho'][0]:.6g}"
        print(f"eps={r['eps']:g} {extra}")
    return EXIT_OK, summary


def run_report(cfg: RunConfig, out: Path):
    paths = [Path(p) for p in cfg.inputs] or sorted(p for p in out.glob("*.json") if p.name != "report.json")
    missing = [str(p) for p in paths if not p.is_file()]
    if missing:
        raise UsageError(f"missing input(s): {', '.join(missing)}")
    entries = {p.name: json.loads(p.read_text(encoding="utf-8")) for p in paths}
    summary = {"n_inputs": len(entries), "inputs": entries}
    io.write_json(out / "report.json", summary)
    print(f"merged {len(entries)} file(s) -> {out / 'report.json'}")
    return EXIT_OK, summary


COMMANDS = {
    "bands": run_bands,
    "validate-freq": run_validate,
    "rationality": run_rationality,
    "breather": run_sweep,
    "modes": run_sweep,
    "simulate": run_sweep,
    "report": run_report,
}


def main(argv=None) -> int:
    try:
        cfg = parse_config(argv)
        out = io.output_dir(cfg.out)
        code, _ = COMMANDS[cfg.subcommand](cfg, out)
        return code
    except SystemExit as exc:  # argparse usage errors
        return int(exc.code or 0)
    except (UsageError, ConfigurationError, FileNotFoundError) as exc:
        print(f"necklace: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (BracketError, ConvergenceError, SimulationError, ArithmeticError) as exc:
        print(f"necklace: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
