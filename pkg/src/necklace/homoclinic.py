"""Symmetric bound states of ``u'' = eps^2 u - u^3`` on the necklace graph.

A bound state is even about a symmetry point ``x0`` (link midpoint or
semicircle midpoint), so it is fixed by ``(u(x0), u'(x0)) = (a, 0)``.  The
amplitude ``a`` is found by bisection between trajectories that turn back
before reaching zero (``a`` too small) and trajectories that cross zero
(``a`` too large); the right half-orbit is then reflected.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BracketError, ConfigurationError
from .floquet import floquet_exponent
from .geometry import DEFAULT_DX, Geometry, GraphProfile, Layout
from .kernels import integrate_segments
from .spectrum import validate_frequency

LINK_CENTERED = "link_centered"
CIRCLE_CENTERED = "circle_centered"
FAMILIES = (LINK_CENTERED, CIRCLE_CENTERED)

# kernel status codes
FINISHED, CROSSED, REBOUNDED, BLEW_UP, NOT_A_NUMBER = 0, 1, 2, 3, 4

BISECTION_RTOL = 1e-14


def normalize_family(family: str) -> str:
    aliases = {"link": LINK_CENTERED, "circle": CIRCLE_CENTERED}
    family = aliases.get(family, family)
    if family not in FAMILIES:
        raise ValueError(f"family must be one of {FAMILIES}, got {family!r}")
    return family


def default_cells(eps: float, geometry: Geometry) -> int:
    return math.ceil(12.0 / (eps * geometry.P))


@dataclass
class Shot:
    """Half-orbit from the symmetry point; arrays are in integration order."""

    u: np.ndarray
    p_before: np.ndarray
    p_after: np.ndarray
    status: int
    stop_index: int

    @property
    def escape_sign(self) -> int:
        """-1: crossed zero, +1: turned back upward or blew up positive, 0: undecided."""
        if self.status == CROSSED:
            return -1
        if self.status == REBOUNDED:
            return 1
        if self.status == BLEW_UP:
            return int(np.sign(self.u[self.stop_index - 1]))
        return 0


def integrate_half(
    eps: float,
    amplitude: float,
    layout: Layout,
    start: int,
    nsteps: int,
    direction: int = 1,
    jumps: bool = True,
    stop: bool = False,
    cubic: float = 1.0,
) -> Shot:
    steps, factors = layout.segments(start, nsteps, direction, jumps)
    h = np.full(steps.size, direction * layout.dx)
    n = nsteps + 1
    u = np.zeros(n)
    pb = np.zeros(n)
    pa = np.zeros(n)
    escape = 10.0 * amplitude if stop and amplitude > 0 else 0.0
    status, filled = integrate_segments(
        float(amplitude), 0.0, eps * eps, cubic, h, steps, factors, u, pb, pa, int(stop), escape
    )
    return Shot(u, pb, pa, int(status), int(filled))


def _assemble(layout: Layout, i0: int, right: Shot, left: Shot | None, meta: dict) -> GraphProfile:
    """Place a right half-orbit (and a left one, or its mirror image) on the window."""
    n = layout.n_nodes
    u = np.empty(n)
    pl = np.empty(n)
    pr = np.empty(n)
    nr = n - i0
    u[i0:] = right.u[:nr]
    pl[i0:] = right.p_before[:nr]
    pr[i0:] = right.p_after[:nr]
    nleft = i0 + 1
    if left is None:
        # reflection about x0: u even, u' odd, one-sided derivatives swap sides
        u[:nleft] = right.u[:nleft][::-1]
        pl[:nleft] = -right.p_after[:nleft][::-1]
        pr[:nleft] = -right.p_before[:nleft][::-1]
    else:
        u[:nleft] = left.u[:nleft][::-1]
        pl[:nleft] = left.p_after[:nleft][::-1]
        pr[:nleft] = left.p_before[:nleft][::-1]
    pl[i0] = pr[i0] = 0.0
    return GraphProfile.from_nodes(
        layout.geometry, -layout.n_cells, layout.n_cells, layout.n_link, layout.n_semi, u, pl, pr, meta
    )


def shoot(
    eps: float,
    family: str,
    amplitude: float,
    n_cells: int,
    dx: float = DEFAULT_DX,
    geometry: Geometry | None = None,
    jumps: bool = True,
    cubic: float = 1.0,
) -> GraphProfile:
    """Integrate from ``(amplitude, 0)`` at the symmetry point and reflect.

    ``jumps=False`` removes the vertex conditions (the equation on the bare
    line), which is useful as a test hook.  When the orbit crosses zero, turns
    back or leaves ``|u| <= 10 * amplitude`` before the window edge, the
    outcome is recorded in ``profile.meta`` (``escape_sign``, ``escape_x``) and
    the rest of the window is left as integrated.
    """
    geometry = geometry or Geometry(1)
    family = normalize_family(family)
    layout = Layout.build(geometry, n_cells, dx)
    i0 = layout.center_index(family)
    reach = max(i0, layout.n_nodes - 1 - i0)
    probe = integrate_half(eps, amplitude, layout, i0, reach, 1, jumps, stop=True, cubic=cubic)
    right = integrate_half(eps, amplitude, layout, i0, reach, 1, jumps, stop=False, cubic=cubic)
    x0 = layout.x()[i0]
    meta = {
        "eps": eps,
        "family": family,
        "amplitude": amplitude,
        "x0": x0,
        "escape_sign": probe.escape_sign,
        "escape_x": x0 + (probe.stop_index - 1) * layout.dx if probe.status else None,
        "status": probe.status,
    }
    return _assemble(layout, i0, right, None, meta)


def classify_amplitude(eps, amplitude, layout, i0, reach, jumps=True) -> int:
    """+1 if the orbit turns back above zero, -1 if it crosses zero, 0 if undecided."""
    return integrate_half(eps, amplitude, layout, i0, reach, 1, jumps, stop=True).escape_sign


def bisect_amplitude(eps: float, layout: Layout, i0: int, jumps: bool = True, bracket=None) -> float:
    lo, hi = bracket or (0.1 * math.sqrt(2) * eps, 10 * math.sqrt(2) * eps)
    # integrate well past the window so the dichotomy is resolved
    reach = 4 * max(i0, layout.n_nodes - 1 - i0)
    s_lo = classify_amplitude(eps, lo, layout, i0, reach, jumps)
    s_hi = classify_amplitude(eps, hi, layout, i0, reach, jumps)
    if not (s_lo == 1 and s_hi == -1):
        raise BracketError(
            f"amplitude bracket [{lo:.6g}, {hi:.6g}] does not separate rebound from crossing "
            f"(signs {s_lo}, {s_hi})"
        )
    for _ in range(200):
        if hi - lo <= BISECTION_RTOL * hi:
            break
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        s = classify_amplitude(eps, mid, layout, i0, reach, jumps)
        if s == 1:
            lo = mid
        elif s == -1:
            hi = mid
        else:
            return mid
    return 0.5 * (lo + hi)


def _require_valid(k: int, l) -> None:
    report = validate_frequency(k, l, 99)
    if not report.valid:
        bad = [m["m"] for m in report.modes if (m["m"] == 1) == (m["class"].startswith("gap"))]
        raise ConfigurationError(
            f"k={k}, l={l} is not a validated breather configuration: modes {bad[:5]} violate "
            "the rule 'lambda_1 in the spectrum, lambda_m (m >= 3 odd) in gaps'"
        )


def fit_decay_rate(profile: GraphProfile, x0: float, floor: float = 1e-12) -> float:
    """Exponential rate from ``log u`` at cell boundaries right of ``x0``."""
    xs, us = [], []
    a = float(np.max(np.abs(profile.u)))
    for i, n in enumerate(profile.cells()):
        x = n * profile.geometry.P
        val = profile.u[i, 0]
        if x > x0 and floor < val < 1e-2 * a:
            xs.append(x)
            us.append(val)
    if len(xs) < 3:
        return float("nan")
    slope, _ = np.polyfit(xs, np.log(us), 1)
    return float(-slope)


@dataclass
class BoundState:
    eps: float
    family: str
    k: int
    l: float
    profile: GraphProfile
    amplitude: float
    beta_hat: float
    beta_lin: float
    x0: float
    layout: Layout = field(repr=False)

    @property
    def max_u(self) -> float:
        return float(np.max(np.abs(self.profile.u)))

    @property
    def c0(self) -> float:
        """Measured ``max|u| / eps``."""
        return self.max_u / self.eps

    def summary(self) -> dict:
        return {
            "eps": self.eps,
            "family": self.family,
            "k": self.k,
            "l": self.l,
            "amplitude": self.amplitude,
            "beta_hat": self.beta_hat,
            "beta_lin": self.beta_lin,
            "max_u": self.max_u,
            "c0": self.c0,
            "x0": self.x0,
            "window": [self.profile.n_min, self.profile.n_max],
            "dx": self.layout.dx,
        }


def find_bound_state(
    eps: float,
    family: str = LINK_CENTERED,
    k: int = 1,
    l=1,
    n_cells: int | None = None,
    dx: float = DEFAULT_DX,
) -> BoundState:
    """Locate the symmetric homoclinic orbit of the given family by shooting."""
    if not 0 < eps <= 0.5:
        raise ValueError("eps must lie in (0, 0.5]")
    _require_valid(k, l)
    family = normalize_family(family)
    geometry = Geometry(l)
    n_cells = n_cells or default_cells(eps, geometry)
    layout = Layout.build(geometry, n_cells, dx)
    i0 = layout.center_index(family)
    a = bisect_amplitude(eps, layout, i0)
    reach = max(i0, layout.n_nodes - 1 - i0)
    right = integrate_half(eps, a, layout, i0, reach)
    x0 = float(layout.x()[i0])
    profile = _assemble(layout, i0, right, None, {"eps": eps, "family": family, "amplitude": a, "x0": x0})
    beta_hat = fit_decay_rate(profile, x0)
    beta_lin = floquet_exponent(-eps * eps, geometry)
    return BoundState(eps, family, k, l, profile, a, beta_hat, beta_lin, x0, layout)


def cross_check_profile(state: BoundState) -> GraphProfile:
    """Same bound state with the left half integrated leftward instead of reflected.

    Negating the step and the derivative is exact in floating point, so this
    reproduces the reflection bit for bit; :func:`sweep_profile` is the
    non-trivial check.
    """
    layout = state.layout
    i0 = layout.center_index(state.family)
    reach = max(i0, layout.n_nodes - 1 - i0)
    right = integrate_half(state.eps, state.amplitude, layout, i0, reach, 1)
    left = integrate_half(state.eps, state.amplitude, layout, i0, reach, -1)
    return _assemble(layout, i0, right, left, dict(state.profile.meta))


def sweep_profile(state: BoundState, level: float = 1e-3) -> tuple[np.ndarray, np.ndarray]:
    """One rightward pass through the symmetry point, started in the left tail.

    The start state mirrors the right half-orbit at the farthest cell-interior
    node where ``u`` is still above ``level`` times the amplitude.  Returns
    node positions and values over the symmetric stretch ``[x0 - d, x0 + d]``.
    """
    layout = state.layout
    i0 = layout.center_index(state.family)
    span = min(i0, layout.n_nodes - 1 - i0)
    right = integrate_half(state.eps, state.amplitude, layout, i0, span)
    vertex = layout.vertex_mask()
    d = 0
    for j in range(1, span + 1):
        if right.u[j] < level * state.amplitude:
            break
        if not vertex[i0 + j]:
            d = j
    if d == 0:
        raise ValueError("window too small for a sweep")
    steps, factors = layout.segments(i0 - d, 2 * d, 1, True)
    h = np.full(steps.size, layout.dx)
    u = np.zeros(2 * d + 1)
    pl = np.zeros(2 * d + 1)
    pr = np.zeros(2 * d + 1)
    eps = state.eps
    integrate_segments(float(right.u[d]), -float(right.p_before[d]), eps * eps, 1.0, h, steps, factors, u, pl, pr)
    return layout.x()[i0 - d : i0 + d + 1], u


def reversibility_residual(state: BoundState, mode: str = "reflection") -> float:
    """``max |u(x0 + s) - u(x0 - s)|`` over grid offsets.

    ``"reflection"`` inspects the assembled profile (zero by construction);
    ``"cross_check"`` inspects the single sweep of :func:`sweep_profile`.
    """
    if mode == "reflection":
        _, u = state.profile.node_values()
        i0 = state.layout.center_index(state.family)
        m = min(i0, u.size - 1 - i0)
        return float(np.max(np.abs(u[i0 : i0 + m + 1] - u[i0 - m : i0 + 1][::-1])))
    if mode == "cross_check":
        _, u = sweep_profile(state)
        return float(np.max(np.abs(u - u[::-1])))
    raise ValueError("mode must be 'reflection' or 'cross_check'")
