"""Truncated coupled-mode system for the time-Fourier coefficients.

With ``u(t, x) = sum_m w_m(x) exp(i m omega t)`` restricted to odd ``m`` and
``w_{-m} = w_m`` real, the Klein-Gordon equation becomes

    w_m'' + (m^2 omega^2 - alpha - eps^2) w_m + (w*w*w)_m = 0,   m = 1, 3, ..., M

on the graph with Kirchhoff vertex conditions.  For ``M = 1`` this is
``w_1'' = eps^2 w_1 - 3 w_1^3``, i.e. ``sqrt(3) w_1`` is a bound state of the
reduced equation.  The sine-series field used by the simulator has
coefficients ``(-1)^((m-1)/2) w_m`` (see :meth:`ModeStack.sine_coefficients`).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_banded

from .errors import ConvergenceError
from .geometry import DEFAULT_DX, Geometry, GraphProfile, Layout
from .homoclinic import LINK_CENTERED, _require_valid, find_bound_state, normalize_family

RESIDUAL_TOL = 1e-10
ARMIJO_FLOOR = 1e-6


class WindowTooSmallWarning(UserWarning):
    pass


def odd_modes(m_max: int) -> list[int]:
    if m_max < 1 or m_max % 2 == 0:
        raise ValueError("M_max must be a positive odd integer")
    return list(range(1, m_max + 1, 2))


def _full_index(W: np.ndarray) -> dict[int, np.ndarray]:
    """Map every index in {+-1, +-3, ..., +-M} to its (symmetric) mode array."""
    full = {}
    for j, w in enumerate(W):
        m = 2 * j + 1
        full[m] = w
        full[-m] = w
    return full


def _pair_sums(full: dict[int, np.ndarray]) -> dict[int, np.ndarray]:
    """``S_k = sum_{a + b = k} W_a W_b`` for all reachable ``k``."""
    out: dict[int, np.ndarray] = {}
    idx = sorted(full)
    for a in idx:
        for b in idx:
            k = a + b
            term = full[a] * full[b]
            out[k] = out[k] + term if k in out else term.copy()
    return out


def convolve3(W: np.ndarray, m: int) -> np.ndarray:
    """Cubic convolution ``(w*w*w)_m`` over the implied symmetric odd index set.

    ``W`` holds modes ``1, 3, ..., M`` along its first axis; indices outside
    ``[-M, M]`` are truncated (taken as zero).
    """
    W = np.asarray(W, dtype=float)
    full = _full_index(W)
    pairs = _pair_sums(full)
    out = np.zeros(W.shape[1:])
    for a, wa in full.items():
        s = pairs.get(m - a)
        if s is not None:
            out = out + wa * s
    return out


def convolve_all(W: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Convolution for every stored mode and its Jacobian ``d conv_m / d w_j``."""
    full = _full_index(W)
    pairs = _pair_sums(full)
    nm = W.shape[0]
    conv = np.zeros_like(W)
    jac = np.zeros((nm, nm) + W.shape[1:])
    zero = np.zeros(W.shape[1:])
    for i in range(nm):
        m = 2 * i + 1
        for a, wa in full.items():
            s = pairs.get(m - a)
            if s is not None:
                conv[i] += wa * s
        for j in range(nm):
            n = 2 * j + 1
            # w_j enters as W_n and W_-n
            jac[i, j] = 3.0 * (pairs.get(m - n, zero) + pairs.get(m + n, zero))
    return conv, jac


@dataclass
class ModeStack:
    eps: float
    k: int
    l: float
    m_max: int
    layout: Layout
    modes: np.ndarray  # shape (n_modes, n_nodes), modes 1, 3, ..., m_max
    family: str = LINK_CENTERED
    info: dict = field(default_factory=dict)

    @property
    def omega(self) -> float:
        return self.k / 2.0

    @property
    def alpha(self) -> float:
        return self.omega ** 2

    @property
    def indices(self) -> list[int]:
        return odd_modes(self.m_max)

    def mode(self, m: int) -> np.ndarray:
        return self.modes[(m - 1) // 2]

    def sine_coefficients(self) -> np.ndarray:
        """Coefficients ``s_m`` with ``u(t, x) = -2 sum_m s_m(x) sin(m omega t)``.

        ``sin(m omega (t + T/4)) = (-1)^((m-1)/2) cos(m omega t)``, so the cosine
        series ``2 sum w_m cos(m omega t)`` shifted by a quarter period and
        negated is the sine series with ``s_m = (-1)^((m-1)/2) w_m``.
        """
        signs = np.array([(-1) ** ((m - 1) // 2) for m in self.indices], dtype=float)
        return signs[:, None] * self.modes

    def sup_norms(self) -> dict[int, float]:
        return {m: float(np.max(np.abs(self.mode(m)))) for m in self.indices}

    def profile(self, m: int) -> GraphProfile:
        return nodes_to_profile(self.layout, self.mode(m), {"mode": m, "eps": self.eps})

    def residual(self) -> "Residual":
        return residual(self)


def nodes_to_profile(layout: Layout, values: np.ndarray, meta: dict | None = None) -> GraphProfile:
    """Wrap node values as a :class:`GraphProfile` with flux-consistent derivatives.

    Away from vertices the derivative is the centred difference.  At a vertex
    the second-order one-sided differences ``d_link`` and ``d_semi`` are
    reconciled into the least-squares pair ``(g, g/2)``; the raw defect
    ``max |d_link - 2 d_semi|`` is kept in ``meta['flux_defect']``.
    """
    u = np.asarray(values, dtype=float)
    dx = layout.dx
    n = u.size
    d = np.empty(n)
    d[1:-1] = (u[2:] - u[:-2]) / (2 * dx)
    d[0] = (-3 * u[0] + 4 * u[1] - u[2]) / (2 * dx)
    d[-1] = (3 * u[-1] - 4 * u[-2] + u[-3]) / (2 * dx)
    pl, pr = d.copy(), d.copy()
    vertices = np.flatnonzero(layout.vertex_mask())
    inner = vertices[(vertices >= 2) & (vertices <= n - 3)]
    left = (3 * u[inner] - 4 * u[inner - 1] + u[inner - 2]) / (2 * dx)
    right = (-3 * u[inner] + 4 * u[inner + 1] - u[inner + 2]) / (2 * dx)
    link_on_left = (inner % layout.per_cell) == 0  # semicircle -> link vertex
    d_link = np.where(link_on_left, right, left)
    d_semi = np.where(link_on_left, left, right)
    g = (4 * d_link + 2 * d_semi) / 5
    pl[inner] = np.where(link_on_left, g / 2, g)
    pr[inner] = np.where(link_on_left, g, g / 2)
    meta = dict(meta or {})
    meta["flux_defect"] = float(np.max(np.abs(d_link - 2 * d_semi))) if inner.size else 0.0
    return GraphProfile.from_nodes(
        layout.geometry, -layout.n_cells, layout.n_cells, layout.n_link, layout.n_semi, u, pl, pr, meta
    )


@dataclass
class Residual:
    fields: np.ndarray  # (n_modes, n_nodes); zero at the clamped end nodes
    sup: float
    l2: float

    def per_mode_sup(self) -> list[float]:
        return [float(v) for v in np.max(np.abs(self.fields), axis=1)]


def _residual_fields(W, layout: Layout, shifts: np.ndarray) -> np.ndarray:
    conv, _ = convolve_all(W) if W.shape[0] > 0 else (np.zeros_like(W), None)
    r = layout.laplacian(W) + shifts[:, None] * W + conv
    r[:, 0] = r[:, -1] = 0.0
    return r


def _shifts(eps, k, m_max) -> np.ndarray:
    omega2 = (k / 2.0) ** 2
    return np.array([m * m * omega2 - omega2 - eps * eps for m in odd_modes(m_max)])


def residual(stack: ModeStack) -> Residual:
    shifts = _shifts(stack.eps, stack.k, stack.m_max)
    r = _residual_fields(stack.modes, stack.layout, shifts)
    mass = stack.layout.node_mass()
    l2 = math.sqrt(float(np.sum(r * r * mass[None, :])) * stack.layout.dx)
    return Residual(r, float(np.max(np.abs(r))), l2)


def _banded_jacobian(W, layout: Layout, shifts: np.ndarray):
    """Jacobian on interior nodes, node-major ordering, in LAPACK banded storage."""
    nm, n = W.shape
    ni = n - 2
    N = nm * ni
    bw = nm
    ab = np.zeros((2 * bw + 1, N))
    w = layout.edge_weights()
    mass = layout.node_mass()
    dx2 = layout.dx ** 2
    lo = w[:-1][:ni] / (mass[1:-1] * dx2)  # coefficient of u_{i-1}
    up = w[1:][:ni] / (mass[1:-1] * dx2)  # coefficient of u_{i+1}
    _, jac = convolve_all(W[:, 1:-1])
    rows = np.arange(ni)
    for i in range(nm):
        for j in range(nm):
            col = rows * nm + j
            row = rows * nm + i
            val = jac[i, j].copy()
            if i == j:
                val += -(lo + up) + shifts[i]
            ab[bw + row - col, col] = val
        row = rows * nm + i
        # neighbours in space, same mode
        col = (rows - 1) * nm + i
        ok = rows > 0
        ab[bw + row[ok] - col[ok], col[ok]] = lo[ok]
        col = (rows + 1) * nm + i
        ok = rows < ni - 1
        ab[bw + row[ok] - col[ok], col[ok]] = up[ok]
    return ab, bw


def solve_bvp(
    eps: float,
    k: int = 1,
    l=1,
    m_max: int = 1,
    n_cells: int | None = None,
    dx: float = DEFAULT_DX,
    initial: np.ndarray | str | None = None,
    family: str = LINK_CENTERED,
    tol: float = RESIDUAL_TOL,
    max_iter: int = 50,
) -> ModeStack:
    """Damped Newton solve of the truncated mode system on a finite window.

    ``initial`` may be an array of node values (modes along the first axis),
    ``"zero"``, or ``None`` for the default guess ``w_1 = u_bound / sqrt(3)``
    built from the shooting solution of the chosen family.
    """
    if not 0 < eps <= 0.5:
        raise ValueError("eps must lie in (0, 0.5]")
    _require_valid(k, l)
    family = normalize_family(family)
    geometry = Geometry(l)
    modes = odd_modes(m_max)
    n_cells = n_cells or math.ceil(24.0 / (eps * geometry.P))
    layout = Layout.build(geometry, n_cells, dx)
    nm = len(modes)

    if initial is None:
        bound = find_bound_state(eps, family, k, l, min(n_cells, math.ceil(12.0 / (eps * geometry.P))), dx)
        _, u_b = bound.profile.node_values()
        W = np.zeros((nm, layout.n_nodes))
        W[0] = layout.embed(u_b, bound.layout) / math.sqrt(3.0)
    elif isinstance(initial, str):
        if initial != "zero":
            raise ValueError("initial must be an array, 'zero' or None")
        W = np.zeros((nm, layout.n_nodes))
    else:
        W = np.array(initial, dtype=float).reshape(-1, layout.n_nodes)
        if W.shape[0] < nm:
            W = np.vstack([W, np.zeros((nm - W.shape[0], layout.n_nodes))])
        W = W[:nm].copy()
    W[:, 0] = W[:, -1] = 0.0

    shifts = _shifts(eps, k, m_max)
    r = _residual_fields(W, layout, shifts)
    norm = float(np.linalg.norm(r))
    history = [float(np.max(np.abs(r)))]
    for it in range(max_iter):
        if history[-1] <= tol:
            break
        ab, bw = _banded_jacobian(W, layout, shifts)
        rhs = -r[:, 1:-1].T.ravel()
        delta = solve_banded((bw, bw), ab, rhs).reshape(-1, nm).T
        t = 1.0
        while True:
            trial = W.copy()
            trial[:, 1:-1] += t * delta
            r_t = _residual_fields(trial, layout, shifts)
            n_t = float(np.linalg.norm(r_t))
            if n_t <= (1 - 1e-4 * t) * norm or n_t == 0.0:
                break
            t *= 0.5
            if t < ARMIJO_FLOOR:
                raise ConvergenceError(
                    f"Newton line search stalled at iteration {it} with sup residual {history[-1]:.3e}"
                )
        W, r, norm = trial, r_t, n_t
        history.append(float(np.max(np.abs(r))))
    else:
        if history[-1] > tol:
            raise ConvergenceError(f"no convergence in {max_iter} iterations, residual {history[-1]:.3e}")

    stack = ModeStack(eps, k, l, m_max, layout, W, family, {"newton_history": history})
    scale = float(np.max(np.abs(W[0])))
    edge = max(float(np.max(np.abs(W[:, layout.per_cell]))), float(np.max(np.abs(W[:, -1 - layout.per_cell]))))
    stack.info["edge_ratio"] = edge / scale if scale > 0 else 0.0
    if scale > 0 and edge > 1e-8 * scale:
        warnings.warn(
            f"window of {n_cells} cells too small: field one cell from the edge is "
            f"{edge / scale:.2e} of max|w_1|",
            WindowTooSmallWarning,
            stacklevel=2,
        )
    return stack


def slaving_report(eps_grid, k: int = 1, l=1, m_max: int = 5, **kw) -> dict:
    """Mode norms over an eps grid and log-log slopes of higher modes against ``w_1``."""
    eps_grid = sorted(eps_grid, reverse=True)
    rows = []
    for eps in eps_grid:
        stack = solve_bvp(eps, k, l, m_max, **kw)
        norms = stack.sup_norms()
        rows.append({"eps": eps, **{f"norm_u{m}": v for m, v in norms.items()}})
    slopes = {}
    n1 = np.log([r["norm_u1"] for r in rows])
    for m in odd_modes(m_max)[1:]:
        if len(rows) >= 2:
            nm = np.log([r[f"norm_u{m}"] for r in rows])
            slopes[f"slope_u{m}"] = float(np.polyfit(n1, nm, 1)[0])
    return {"k": k, "l": l, "m_max": m_max, "rows": rows, "slopes": slopes}
