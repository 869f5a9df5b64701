"""Transfer and monodromy matrices of ``-u'' = lam u`` on the necklace cell."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .geometry import ENTER_SEMICIRCLE, LEAVE_SEMICIRCLE, LINK, Geometry, locate
from .kernels import integrate_segments

GAP_POSITIVE = "gap_positive"
GAP_NEGATIVE = "gap_negative"
BAND = "band"
EDGE = "edge"

EDGE_TOL = 1e-9
SCAN_EDGE_TOL = 1e-6

# below this value of |lam| s^2 the trig/hyperbolic branches lose accuracy
_SERIES_CUTOFF = 1e-4


def _cos_sinc(s: float, lam: float) -> tuple[float, float]:
    """``cos(sqrt(lam) s)`` and ``sin(sqrt(lam) s) / sqrt(lam)``, smooth across 0."""
    z = lam * s * s
    if abs(z) < _SERIES_CUTOFF:
        # cos: sum (-z)^j / (2j)!,  sinc: s * sum (-z)^j / (2j+1)!
        c = 1.0 - z / 2.0 + z * z / 24.0 - z ** 3 / 720.0
        sn = s * (1.0 - z / 6.0 + z * z / 120.0 - z ** 3 / 5040.0)
        return c, sn
    if lam > 0:
        w = math.sqrt(lam)
        return math.cos(w * s), math.sin(w * s) / w
    w = math.sqrt(-lam)
    return math.cosh(w * s), math.sinh(w * s) / w


def transfer(s: float, lam: float) -> np.ndarray:
    """Propagator of ``(u, u')`` over a smooth segment of length ``s``."""
    if not s > 0:
        raise ValueError("segment length must be positive")
    c, sn = _cos_sinc(s, lam)
    return np.array([[c, sn], [-lam * sn, c]])


_ENTER = np.diag([1.0, ENTER_SEMICIRCLE])
_LEAVE = np.diag([1.0, LEAVE_SEMICIRCLE])


def _cell_pieces(geometry: Geometry, base: float):
    """Walk ``[base, base + P)``: yield ('flow', length) and ('jump', factor)."""
    L, P = geometry.L, geometry.P
    _, seg, local = locate(base, geometry)
    # positions of the two vertices ahead, relative to base
    if seg == LINK:
        first = (L - local, ENTER_SEMICIRCLE)
        second = (L - local + math.pi, LEAVE_SEMICIRCLE)
    else:
        first = (math.pi - local, LEAVE_SEMICIRCLE)
        second = (math.pi - local + L, ENTER_SEMICIRCLE)
    pos = 0.0
    for where, factor in (first, second):
        if where > pos:
            yield "flow", where - pos
        yield "jump", factor
        pos = where
    if P > pos:
        yield "flow", P - pos


@dataclass(frozen=True)
class Monodromy:
    matrix: np.ndarray
    lam: float
    base: float = 0.0

    @property
    def trace(self) -> float:
        return float(self.matrix[0, 0] + self.matrix[1, 1])

    @property
    def det(self) -> float:
        m = self.matrix
        return float(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])


def monodromy(lam: float, geometry: Geometry, base: float = 0.0) -> Monodromy:
    """One-period propagator started at ``base`` (right-hand derivatives)."""
    if not 0.0 <= base < geometry.P:
        raise ValueError("base point must lie in [0, P)")
    if base == 0.0:
        M = _LEAVE @ transfer(math.pi, lam) @ _ENTER @ transfer(geometry.L, lam)
        return Monodromy(M, lam, 0.0)
    M = np.eye(2)
    for kind, val in _cell_pieces(geometry, base):
        if kind == "flow":
            M = transfer(val, lam) @ M
        else:
            M = np.diag([1.0, val]) @ M
    return Monodromy(M, lam, base)


def monodromy_by_integration(
    lam: float, geometry: Geometry, base: float = 0.0, h: float = 1e-4
) -> Monodromy:
    """Monodromy from RK4 integration of the first-order system.

    Each smooth piece of length ``s`` is integrated with ``ceil(s / h)`` equal
    steps, so ``h`` is an upper bound on the step actually taken.
    """
    if not h > 0:
        raise ValueError("step size must be positive")
    if not 0.0 <= base < geometry.P:
        raise ValueError("base point must lie in [0, P)")
    flows: list[float] = []
    jumps: list[float] = []
    for kind, val in _cell_pieces(geometry, base):
        if kind == "flow":
            flows.append(val)
            jumps.append(1.0)
        else:
            if not flows:
                flows.append(0.0)
                jumps.append(1.0)
            jumps[-1] *= val
    steps = np.array([max(1, math.ceil(s / h - 1e-9)) if s > 0 else 0 for s in flows], dtype=np.int64)
    hs = np.array([s / n if n else 0.0 for s, n in zip(flows, steps)])
    jumps_a = np.array(jumps)
    n = int(steps.sum()) + 1
    cols = []
    for u0, p0 in ((1.0, 0.0), (0.0, 1.0)):
        u = np.empty(n)
        pl = np.empty(n)
        pr = np.empty(n)
        integrate_segments(u0, p0, -lam, 0.0, hs, steps, jumps_a, u, pl, pr, 0, 0.0)
        cols.append((u[-1], pr[-1]))
    M = np.array([[cols[0][0], cols[1][0]], [cols[0][1], cols[1][1]]])
    return Monodromy(M, lam, base)


def trace_formula(omega_m: float, geometry: Geometry) -> float:
    """Closed-form trace as a function of ``omega_m = sqrt(lam)``."""
    L = geometry.L
    return 0.25 * (9.0 * math.cos((L + math.pi) * omega_m) - math.cos((L - math.pi) * omega_m))


def trace_of_lambda(lam, geometry: Geometry):
    """Closed-form trace in terms of ``lam``; vectorised, hyperbolic for ``lam < 0``."""
    lam = np.asarray(lam, dtype=float)
    L = geometry.L
    w = np.sqrt(np.abs(lam))
    a, b = (L + math.pi) * w, (L - math.pi) * w
    pos = 0.25 * (9.0 * np.cos(a) - np.cos(b))
    neg = 0.25 * (9.0 * np.cosh(np.where(lam < 0, a, 0.0)) - np.cosh(np.where(lam < 0, b, 0.0)))
    out = np.where(lam >= 0, pos, neg)
    return float(out) if out.ndim == 0 else out


def trace_derivative(lam, geometry: Geometry):
    """``d tr / d lam`` of :func:`trace_of_lambda`, finite at ``lam = 0``."""
    lam = np.asarray(lam, dtype=float)
    L = geometry.L
    A, B = L + math.pi, L - math.pi
    w = np.sqrt(np.abs(lam))
    safe = np.where(w > 0, w, 1.0)
    # d/dlam cos(A w) = -A sin(A w)/(2w) for lam > 0, -A sinh(A w)/(2w) for lam < 0
    pos = 0.25 * (-9.0 * A * np.sin(A * w) + B * np.sin(B * w)) / (2 * safe)
    neg = 0.25 * (-9.0 * A * np.sinh(A * w) + B * np.sinh(B * w)) / (2 * safe)
    limit = 0.25 * (-9.0 * A * A + B * B) / 2
    out = np.where(w > 0, np.where(lam > 0, pos, neg), limit)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class FloquetClassification:
    case: str
    trace: float
    multipliers: tuple[complex, complex]
    exponent: float
    degenerate_edge: bool = False

    @property
    def in_spectrum(self) -> bool:
        return self.case in (BAND, EDGE)


def classify_trace(tr: float, period: float = 2 * math.pi, tol: float = EDGE_TOL) -> FloquetClassification:
    disc = cmath.sqrt(tr * tr - 4.0)
    mu1 = (tr + disc) / 2.0
    mu2 = (tr - disc) / 2.0
    if abs(abs(tr) - 2.0) <= tol:
        return FloquetClassification(EDGE, tr, (mu1, mu2), 0.0, True)
    if tr > 2.0:
        return FloquetClassification(GAP_POSITIVE, tr, (mu1, mu2), math.acosh(tr / 2.0) / period)
    if tr < -2.0:
        return FloquetClassification(GAP_NEGATIVE, tr, (mu1, mu2), math.acosh(-tr / 2.0) / period)
    return FloquetClassification(BAND, tr, (mu1, mu2), 0.0)


def classify(M: Monodromy, geometry: Geometry | None = None, tol: float = EDGE_TOL) -> FloquetClassification:
    """Band/gap/edge case of a monodromy matrix with its Floquet multipliers."""
    if abs(M.det - 1.0) > 1e-10 * max(1.0, float(np.abs(M.matrix).max()) ** 2):
        raise ValueError(f"monodromy determinant {M.det!r} is not 1")
    period = geometry.P if geometry is not None else 2 * math.pi
    return classify_trace(M.trace, period, tol)


def floquet_exponent(lam: float, geometry: Geometry) -> float:
    """Decay rate ``beta`` with ``2 cosh(beta P) = |tr M(lam)|`` (0 inside bands)."""
    tr = abs(trace_of_lambda(lam, geometry))
    return math.acosh(tr / 2.0) / geometry.P if tr > 2.0 else 0.0
