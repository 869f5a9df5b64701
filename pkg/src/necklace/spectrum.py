"""Band/gap scans of the trace and the breather frequency selection rule."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import io
from .floquet import (
    BAND,
    EDGE_TOL,
    GAP_NEGATIVE,
    GAP_POSITIVE,
    SCAN_EDGE_TOL,
    classify_trace,
    trace_derivative,
    trace_of_lambda,
)
from .geometry import Geometry

BISECT_TOL = 1e-10
TOUCH_TOL = 1e-9


class CoarseGridWarning(UserWarning):
    pass


def _bisect(f, a: float, b: float, tol: float = BISECT_TOL, maxiter: int = 200) -> float:
    fa = f(a)
    for _ in range(maxiter):
        if b - a <= tol:
            break
        c = 0.5 * (a + b)
        fc = f(c)
        if fc == 0.0:
            return float(c)
        if (fc > 0) == (fa > 0):
            a, fa = c, fc
        else:
            b = c
    return float(0.5 * (a + b))


@dataclass
class BandScan:
    geometry: Geometry
    lam: np.ndarray
    trace: np.ndarray
    classes: list[str]
    edges: list[float]
    touches: list[float]
    bands: list[tuple[float, float]]
    gaps: list[tuple[float, float, str]]
    warnings: list[str] = field(default_factory=list)

    def intervals(self) -> list[tuple[float, float, str]]:
        out = [(a, b, BAND) for a, b in self.bands] + list(self.gaps)
        return sorted(out)

    def rows(self):
        for lam, tr, c in zip(self.lam, self.trace, self.classes):
            yield float(lam), float(tr), c

    def to_csv(self, path):
        return io.write_rows(path, "lambda,trace,class", self.rows())


def scan_bands(geometry: Geometry, lmin: float, lmax: float, n: int = 2001) -> BandScan:
    """Scan ``tr M(lam)`` on a uniform grid and split the range into bands and gaps."""
    if not (math.isfinite(lmin) and math.isfinite(lmax)) or lmax <= lmin:
        raise ValueError("need a finite range with lmin < lmax")
    if n < 2:
        raise ValueError("grid needs at least two points")
    lam = np.linspace(lmin, lmax, n)
    tr = trace_of_lambda(lam, geometry)
    classes = [classify_trace(float(t), geometry.P, SCAN_EDGE_TOL).case for t in tr]

    def excess(x):
        return abs(trace_of_lambda(x, geometry)) - 2.0

    def slope(x):
        return trace_derivative(x, geometry)

    f = np.abs(tr) - 2.0
    df = trace_derivative(lam, geometry)
    edges: list[float] = []
    touches: list[float] = []
    notes: list[str] = []
    for i in range(n - 1):
        a, b = lam[i], lam[i + 1]
        fa, fb = f[i], f[i + 1]
        if fa == 0.0:
            edges.append(float(a))
            continue
        if fa * fb < 0:
            edges.append(_bisect(excess, a, b))
            continue
        if df[i] * df[i + 1] < 0:
            # tr has an extremum inside this cell
            xe = _bisect(slope, a, b)
            fe = excess(xe)
            if abs(fe) <= TOUCH_TOL:
                touches.append(xe)
            elif fb != 0.0 and (fe > 0) != (fa > 0):
                msg = f"grid too coarse near lambda={xe:.6g}: edge pair inside one cell"
                notes.append(msg)
                warnings.warn(msg, CoarseGridWarning, stacklevel=2)
                edges.extend([_bisect(excess, a, xe), _bisect(excess, xe, b)])
    if f[-1] == 0.0:
        edges.append(float(lam[-1]))

    # a zero grid value is a touching point when the sign does not change across it
    true_edges = []
    for e in sorted(set(edges)):
        left, right = excess(max(lmin, e - 1e-7)), excess(min(lmax, e + 1e-7))
        if e in (lmin, lmax) or (left > 0) != (right > 0):
            true_edges.append(e)
        elif abs(excess(e)) <= TOUCH_TOL:
            touches.append(e)

    cuts = [lmin] + [e for e in true_edges if lmin < e < lmax] + [lmax]
    pieces = []
    for a, b in zip(cuts[:-1], cuts[1:]):
        if b <= a:
            continue
        mid = 0.5 * (a + b)
        t = trace_of_lambda(mid, geometry)
        kind = BAND if abs(t) < 2 else (GAP_POSITIVE if t > 0 else GAP_NEGATIVE)
        if pieces and pieces[-1][2] == kind:
            pieces[-1] = (pieces[-1][0], b, kind)
        else:
            pieces.append((a, b, kind))
    bands = [(a, b) for a, b, k in pieces if k == BAND]
    gaps = [p for p in pieces if p[2] != BAND]
    return BandScan(geometry, lam, tr, classes, true_edges, sorted(set(touches)), bands, gaps, notes)


@dataclass
class FrequencyReport:
    k: int
    l: float
    omega: float
    alpha: float
    modes: list[dict]
    verdict: str
    limit_trace: float

    @property
    def valid(self) -> bool:
        return self.verdict == "valid"

    def to_dict(self) -> dict:
        return {
            "schema": io.SCHEMA_VERSION,
            "k": self.k,
            "l": self.l,
            "omega": self.omega,
            "alpha": self.alpha,
            "modes": self.modes,
            "verdict": self.verdict,
            "limit_trace": self.limit_trace,
        }


def validate_frequency(k: int, l=1, m_check: int = 99) -> FrequencyReport:
    """Check the center/hyperbolic split for ``omega = k/2`` and ``alpha = omega^2``.

    The configuration is valid when ``lam_1 = 0`` lies in the spectrum and every
    ``lam_m = m^2 omega^2 - alpha`` with odd ``3 <= m <= m_check`` lies in a gap.
    """
    if k < 1 or k % 2 == 0:
        raise ValueError("k must be a positive odd integer")
    if m_check < 3 or m_check % 2 == 0:
        raise ValueError("m_check must be odd and at least 3")
    geometry = Geometry(l)
    omega = k / 2.0
    alpha = omega * omega
    modes = []
    valid = True
    for m in range(1, m_check + 1, 2):
        lam = m * m * alpha - alpha
        tr = trace_of_lambda(lam, geometry)
        cls = classify_trace(tr, geometry.P, EDGE_TOL)
        modes.append({"m": m, "lambda": lam, "trace": tr, "margin": abs(tr) - 2.0, "class": cls.case})
        if m == 1:
            valid &= cls.in_spectrum
        else:
            valid &= cls.case in (GAP_POSITIVE, GAP_NEGATIVE)
    # odd multiples of omega = k/2 are where the traces of high modes accumulate
    limit = trace_of_lambda(omega * omega, geometry)
    return FrequencyReport(k, l, omega, alpha, modes, "valid" if valid else "invalid", limit)


def _frac_gcd(a: Fraction, b: Fraction) -> Fraction:
    if a == 0:
        return abs(b)
    if b == 0:
        return abs(a)
    den = a.denominator * b.denominator
    return Fraction(math.gcd(a.numerator * b.denominator, b.numerator * a.denominator), den)


def rationality_check(l) -> dict:
    """Whether ``(L - pi)/(L + pi)`` is rational, i.e. whether the trace is periodic in omega.

    Integers, :class:`~fractions.Fraction` and strings like ``"3/2"`` are
    treated exactly; any other real input is flagged as a non-periodic trace.
    """
    exact = None
    if isinstance(l, Fraction):
        exact = l
    elif isinstance(l, int):
        exact = Fraction(l)
    elif isinstance(l, str):
        try:
            exact = Fraction(l.strip())
        except ValueError:
            exact = None
    if exact is not None:
        if exact <= 0:
            raise ValueError("link multiplier must be positive")
        ratio = (exact - 1) / (exact + 1)
        # tr(omega) = (9 cos(2 pi f1 omega) - cos(2 pi f2 omega)) / 4
        f1, f2 = (exact + 1) / 2, abs(exact - 1) / 2
        period = 1 / _frac_gcd(f1, f2)
        return {
            "l": str(exact),
            "ratio": str(ratio),
            "rational": True,
            "periodic": True,
            "trace_period": str(period),
            "flag": None,
        }
    value = float(l) if not isinstance(l, str) else float(eval_real(l))
    return {
        "l": io.fmt(value),
        "ratio": None,
        "rational": False,
        "periodic": False,
        "trace_period": None,
        "flag": "non-periodic trace",
    }


def eval_real(text: str) -> float:
    """Parse ``sqrt(2)``, ``pi/3``-style literals without ``eval``."""
    t = text.strip().lower().replace(" ", "")
    if t.startswith("sqrt(") and t.endswith(")"):
        return math.sqrt(float(t[5:-1]))
    if t.startswith("sqrt"):
        return math.sqrt(float(t[4:]))
    if t in ("pi", "e"):
        return math.pi if t == "pi" else math.e
    return float(t)
