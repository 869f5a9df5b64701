"""Necklace graph geometry restricted to the semicircle-symmetric subspace.

The graph is identified with the real line.  Cell ``n`` consists of a
horizontal link ``[nP, nP + L]`` followed by a (doubled) semicircle
``[nP + L, (n + 1)P]``.  Functions are continuous at the vertices while the
derivative jumps: the link derivative is twice the semicircle derivative.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

import numpy as np

LINK = "link"
SEMICIRCLE = "semicircle"

#: derivative factor applied when moving right from a link into a semicircle
ENTER_SEMICIRCLE = 0.5
#: derivative factor applied when moving right from a semicircle into a link
LEAVE_SEMICIRCLE = 2.0

DEFAULT_DX = math.pi / 200


@dataclass(frozen=True)
class Geometry:
    """Unit cell of the necklace graph with link length ``l * pi``."""

    l: float = 1

    def __post_init__(self):
        if not self.l > 0:
            raise ValueError(f"link multiplier must be positive, got {self.l!r}")

    @property
    def L(self) -> float:
        return float(self.l) * math.pi

    @property
    def P(self) -> float:
        return self.L + math.pi

    @property
    def is_breather_candidate(self) -> bool:
        """True for odd integer ``l``, the configurations the breather theory covers."""
        return float(self.l).is_integer() and int(self.l) % 2 == 1

    def symmetry_point(self, family: str) -> float:
        if family in ("link", "link_centered"):
            return self.L / 2
        if family in ("circle", "circle_centered"):
            return self.L + math.pi / 2
        raise ValueError(f"unknown family {family!r}")

    def to_global(self, cell: int, segment: str, local: float) -> float:
        """Inverse of :func:`locate`."""
        base = cell * self.P
        return base + local if segment == LINK else base + self.L + local


def locate(x: float, geometry: Geometry) -> tuple[int, str, float]:
    """Return ``(cell, segment, local coordinate)`` of the point ``x``.

    Vertices belong to the segment that starts there.
    """
    P, L = geometry.P, geometry.L
    q, r = divmod(x, P)
    n = int(q)
    # floating point can push r to P for x just below a cell boundary
    if r >= P:
        n += 1
        r = 0.0
    if r < L:
        return n, LINK, r
    return n, SEMICIRCLE, r - L


def segment_counts(geometry: Geometry, dx: float) -> tuple[int, int, float]:
    """Number of grid steps on link and semicircle for a requested spacing.

    The spacing is snapped to ``pi / N`` so that both segment lengths are integer
    multiples of it.  Returns ``(n_link, n_semi, dx_used)``.
    """
    if not dx > 0:
        raise ValueError("dx must be positive")
    n_semi = max(2, int(round(math.pi / dx)))
    if n_semi % 2:
        n_semi += 1  # symmetry points sit at segment midpoints
    l = geometry.l
    n_link_f = float(l) * n_semi
    n_link = int(round(n_link_f))
    if abs(n_link - n_link_f) > 1e-9 or n_link % 2:
        raise ValueError(f"link length {l}*pi is not commensurate with dx = pi/{n_semi}")
    return n_link, n_semi, math.pi / n_semi


@dataclass(frozen=True, eq=False)
class GraphProfile:
    """Piecewise smooth function on cells ``n_min..n_max`` of the symmetric line.

    ``u`` and ``up`` have shape ``(ncells, n_link + n_semi + 2)``: the first
    ``n_link + 1`` columns sample the link (both endpoints included), the rest
    sample the semicircle.  Vertex values are therefore stored twice, each copy
    carrying the one-sided derivative of its own segment.
    """

    geometry: Geometry
    n_min: int
    n_max: int
    n_link: int
    n_semi: int
    u: np.ndarray
    up: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        shape = (self.ncells, self.n_link + self.n_semi + 2)
        if self.u.shape != shape or self.up.shape != shape:
            raise ValueError(f"sample arrays must have shape {shape}")

    @property
    def ncells(self) -> int:
        return self.n_max - self.n_min + 1

    @property
    def dx(self) -> float:
        return math.pi / self.n_semi

    def cells(self) -> range:
        return range(self.n_min, self.n_max + 1)

    def link(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        i = n - self.n_min
        return self.u[i, : self.n_link + 1], self.up[i, : self.n_link + 1]

    def semicircle(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        i = n - self.n_min
        return self.u[i, self.n_link + 1 :], self.up[i, self.n_link + 1 :]

    def x(self) -> np.ndarray:
        """Global coordinates matching ``u`` (vertex coordinates duplicated)."""
        dx = self.dx
        local = np.concatenate(
            [np.arange(self.n_link + 1) * dx, self.geometry.L + np.arange(self.n_semi + 1) * dx]
        )
        base = np.arange(self.n_min, self.n_max + 1)[:, None] * self.geometry.P
        return base + local[None, :]

    def segment_labels(self) -> np.ndarray:
        return np.array([LINK] * (self.n_link + 1) + [SEMICIRCLE] * (self.n_semi + 1))

    # shared-node view -------------------------------------------------------

    def node_values(self) -> tuple[np.ndarray, np.ndarray]:
        """Values on the shared-node grid ``x_min + i*dx`` with coordinates."""
        N = self.n_link + self.n_semi
        vals = np.empty(self.ncells * N + 1)
        body = np.concatenate([self.u[:, : self.n_link], self.u[:, self.n_link + 1 : -1]], axis=1)
        vals[:-1] = body.ravel()
        vals[-1] = self.u[-1, -1]
        x = self.n_min * self.geometry.P + np.arange(vals.size) * self.dx
        return x, vals

    @classmethod
    def from_nodes(
        cls,
        geometry: Geometry,
        n_min: int,
        n_max: int,
        n_link: int,
        n_semi: int,
        u: np.ndarray,
        p_left: np.ndarray,
        p_right: np.ndarray,
        meta: dict | None = None,
    ) -> "GraphProfile":
        """Build a profile from shared-node arrays and one-sided derivatives."""
        N = n_link + n_semi
        ncells = n_max - n_min + 1
        if u.size != ncells * N + 1:
            raise ValueError("node array does not match the cell window")
        U = np.empty((ncells, N + 2))
        D = np.empty_like(U)
        for c in range(ncells):
            s = c * N
            U[c, : n_link + 1] = u[s : s + n_link + 1]
            U[c, n_link + 1 :] = u[s + n_link : s + N + 1]
            D[c, :n_link] = p_right[s : s + n_link]
            D[c, n_link] = p_left[s + n_link]
            D[c, n_link + 1 : -1] = p_right[s + n_link : s + N]
            D[c, -1] = p_left[s + N]
        return cls(geometry, n_min, n_max, n_link, n_semi, U, D, dict(meta or {}))

    def __iter__(self) -> Iterator[tuple[float, float, float, int, str]]:
        xs = self.x()
        labels = self.segment_labels()
        for i, n in enumerate(self.cells()):
            for j in range(xs.shape[1]):
                yield xs[i, j], self.u[i, j], self.up[i, j], n, labels[j]

    def to_csv(self, path) -> None:
        with open(path, "w", newline="\n") as fh:
            fh.write("x,u,uprime,cell,segment\n")
            for x, u, up, n, seg in self:
                fh.write(f"{x:.17g},{u:.17g},{up:.17g},{n},{seg}\n")

    @classmethod
    def from_csv(cls, path, geometry: Geometry) -> "GraphProfile":
        rows = np.genfromtxt(path, delimiter=",", names=True, dtype=None, encoding="utf-8")
        cells = np.asarray(rows["cell"], dtype=int)
        seg = np.asarray(rows["segment"])
        n_min, n_max = int(cells.min()), int(cells.max())
        first = cells == n_min
        n_link = int(np.sum(seg[first] == LINK)) - 1
        n_semi = int(np.sum(seg[first] == SEMICIRCLE)) - 1
        shape = (n_max - n_min + 1, n_link + n_semi + 2)
        u = np.asarray(rows["u"], dtype=float).reshape(shape)
        up = np.asarray(rows["uprime"], dtype=float).reshape(shape)
        return cls(geometry, n_min, n_max, n_link, n_semi, u, up)


@dataclass(frozen=True)
class Layout:
    """Shared-node grid over cells ``-n_cells..n_cells`` with ``x_i = -n_cells P + i dx``."""

    geometry: Geometry
    n_cells: int
    n_link: int
    n_semi: int
    dx: float

    @classmethod
    def build(cls, geometry: Geometry, n_cells: int, dx: float = DEFAULT_DX) -> "Layout":
        n_link, n_semi, dx = segment_counts(geometry, dx)
        return cls(geometry, n_cells, n_link, n_semi, dx)

    @property
    def per_cell(self) -> int:
        return self.n_link + self.n_semi

    @property
    def n_nodes(self) -> int:
        return (2 * self.n_cells + 1) * self.per_cell + 1

    def x(self) -> np.ndarray:
        return -self.n_cells * self.geometry.P + np.arange(self.n_nodes) * self.dx

    def center_index(self, family: str) -> int:
        base = self.n_cells * self.per_cell
        if family in ("link", "link_centered"):
            return base + self.n_link // 2
        return base + self.n_link + self.n_semi // 2

    def vertex_mask(self) -> np.ndarray:
        r = np.arange(self.n_nodes) % self.per_cell
        return (r == 0) | (r == self.n_link)

    def edge_weights(self) -> np.ndarray:
        """Weight of each grid edge: 1 on links, 2 on the doubled semicircles."""
        r = np.arange(self.n_nodes - 1) % self.per_cell
        return np.where(r < self.n_link, 1.0, 2.0)

    def node_mass(self) -> np.ndarray:
        """Relative node measure, the mean of the adjacent edge weights (1.5 at vertices)."""
        w = self.edge_weights()
        m = np.empty(self.n_nodes)
        m[1:-1] = 0.5 * (w[1:] + w[:-1])
        m[0], m[-1] = w[0], w[-1]
        return m

    def laplacian(self, u: np.ndarray) -> np.ndarray:
        """Flux-balance second difference; zero at the two window end nodes.

        Self-adjoint for the node measure; at a vertex it is the discrete form of
        ``u'_link = 2 u'_semicircle``.
        """
        flux = self.edge_weights() * np.diff(u, axis=-1)
        out = np.zeros_like(u)
        out[..., 1:-1] = (flux[..., 1:] - flux[..., :-1]) / (self.node_mass()[1:-1] * self.dx * self.dx)
        return out

    def embed(self, values: np.ndarray, other: "Layout") -> np.ndarray:
        """Copy node values from a smaller, co-centred layout, padding with zeros."""
        if (other.n_link, other.n_semi) != (self.n_link, self.n_semi) or other.n_cells > self.n_cells:
            raise ValueError("layouts are not nested")
        out = np.zeros(values.shape[:-1] + (self.n_nodes,))
        off = (self.n_cells - other.n_cells) * self.per_cell
        out[..., off : off + other.n_nodes] = values
        return out

    def segments(self, start: int, nsteps: int, direction: int = 1, jumps: bool = True):
        """Step counts and derivative factors walking ``nsteps`` nodes from ``start``.

        Node indices beyond the window are continued periodically.  Factors are
        applied to ``u'`` on arrival at a vertex (Kirchhoff: link = 2 * semicircle).
        """
        steps, factors = [], []
        i, left = start, nsteps
        N, nl = self.per_cell, self.n_link
        while left > 0:
            r = i % N
            if direction > 0:
                to_vertex = nl - r if r < nl else N - r
            else:
                r = r or N
                to_vertex = r if r <= nl else r - nl
            n = min(to_vertex, left)
            if n == to_vertex and jumps:
                rj = (i + direction * n) % N
                if direction > 0:
                    f = ENTER_SEMICIRCLE if rj == nl else LEAVE_SEMICIRCLE
                else:
                    f = LEAVE_SEMICIRCLE if rj == nl else ENTER_SEMICIRCLE
            else:
                f = 1.0
            steps.append(n)
            factors.append(f)
            i += direction * n
            left -= n
        return np.array(steps, dtype=np.int64), np.array(factors)


def kirchhoff_residual(profile: GraphProfile) -> float:
    """Largest flux defect ``|u'_link - 2 u'_semi|`` plus largest value jump.

    Only vertices interior to the window are inspected.
    """
    nl = profile.n_link
    U, D = profile.u, profile.up
    # link end -> semicircle start, inside every cell
    flux = np.abs(D[:, nl] - 2.0 * D[:, nl + 1])
    jump = np.abs(U[:, nl] - U[:, nl + 1])
    # semicircle end -> next link start
    if profile.ncells > 1:
        flux = np.concatenate([flux, np.abs(D[1:, 0] - 2.0 * D[:-1, -1])])
        jump = np.concatenate([jump, np.abs(U[1:, 0] - U[:-1, -1])])
    return float(flux.max() + jump.max())


def rational_l(l) -> Fraction | None:
    """Exact rational form of a link multiplier, ``None`` if not representable."""
    if isinstance(l, Fraction):
        return l
    if isinstance(l, int):
        return Fraction(l)
    if isinstance(l, str):
        try:
            return Fraction(l)
        except ValueError:
            return None
    return None
