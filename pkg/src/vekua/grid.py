"""Voxel discretization of a bounded domain G (ball or axis-aligned box).

A grid covers the bounding box of G with n cells per axis; a cell belongs
to the domain iff its center does.  Quadrature is the midpoint rule with
per-cell weight equal to the cell volume, which makes the total weight
converge to vol(G) at O(h) for the ball and exactly for the box.

Fields store values only on inside cells (compact layout) in row-major
order of the full grid; an index map supports neighbor lookups for the
finite-difference operators.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .biquat import Biquaternion, bq_bar, bq_inner, bq_mul, bq_norm

__all__ = [
    "DomainSpec",
    "ball",
    "box",
    "DomainGrid",
    "BiquatField",
    "ScalarField",
    "SurfaceMesh",
    "build_grid",
    "sample",
    "sample_vectorized",
    "sample_scalar",
    "sphere_mesh",
    "apply_D",
    "apply_D_right",
    "apply_partial",
    "laplacian",
    "l2_inner",
    "l2_norm",
    "hc_inner",
    "sc_pairing",
]


class GridMismatchError(ValueError):
    """Two fields that must share a grid do not."""


@dataclass(frozen=True)
class DomainSpec:
    """Bounded domain: ball(center, radius) or box(min, max)."""

    kind: str
    center: np.ndarray | None = None
    radius: float | None = None
    lo: np.ndarray | None = None
    hi: np.ndarray | None = None

    def __post_init__(self):
        if self.kind == "ball":
            if self.radius is None or self.radius <= 0:
                raise ValueError("ball radius must be positive")
            object.__setattr__(self, "center", np.asarray(self.center, dtype=float))
        elif self.kind == "box":
            lo = np.asarray(self.lo, dtype=float)
            hi = np.asarray(self.hi, dtype=float)
            if not np.all(lo < hi):
                raise ValueError("box needs min < max componentwise")
            object.__setattr__(self, "lo", lo)
            object.__setattr__(self, "hi", hi)
        else:
            raise ValueError(f"unknown domain kind {self.kind!r}")

    @property
    def bounding_lo(self) -> np.ndarray:
        if self.kind == "ball":
            return self.center - self.radius
        return self.lo

    @property
    def bounding_hi(self) -> np.ndarray:
        if self.kind == "ball":
            return self.center + self.radius
        return self.hi

    def diameter(self) -> float:
        if self.kind == "ball":
            return 2.0 * self.radius
        return float(np.linalg.norm(self.hi - self.lo))

    def circumradius(self) -> float:
        """Radius of the smallest origin-at-center sphere containing G."""
        if self.kind == "ball":
            return float(self.radius)
        return float(np.linalg.norm(self.hi - self.lo) / 2.0)

    def domain_center(self) -> np.ndarray:
        if self.kind == "ball":
            return self.center.copy()
        return (self.lo + self.hi) / 2.0

    def contains(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(pts)
        if self.kind == "ball":
            return np.linalg.norm(pts - self.center, axis=-1) < self.radius
        return np.all((pts > self.lo) & (pts < self.hi), axis=-1)

    def boundary_distance(self, pts: np.ndarray) -> np.ndarray:
        """Signed distance to the boundary, positive inside."""
        pts = np.atleast_2d(pts)
        if self.kind == "ball":
            return self.radius - np.linalg.norm(pts - self.center, axis=-1)
        return np.minimum(
            np.min(pts - self.lo, axis=-1), np.min(self.hi - pts, axis=-1)
        )

    def volume(self) -> float:
        if self.kind == "ball":
            return 4.0 / 3.0 * np.pi * self.radius**3
        return float(np.prod(self.hi - self.lo))

    def to_json(self) -> dict:
        if self.kind == "ball":
            return {"kind": "ball", "center": list(self.center), "radius": self.radius}
        return {"kind": "box", "min": list(self.lo), "max": list(self.hi)}

    @classmethod
    def from_json(cls, d: dict) -> "DomainSpec":
        if d["kind"] == "ball":
            return ball(d["center"], d["radius"])
        return box(d["min"], d["max"])


def ball(center=(0.0, 0.0, 0.0), radius: float = 1.0) -> DomainSpec:
    return DomainSpec(kind="ball", center=np.asarray(center, float), radius=float(radius))


def box(lo=(0.0, 0.0, 0.0), hi=(1.0, 1.0, 1.0)) -> DomainSpec:
    return DomainSpec(kind="box", lo=np.asarray(lo, float), hi=np.asarray(hi, float))


class DomainGrid:
    """Voxel grid over the bounding box of a DomainSpec.

    Attributes
    ----------
    spec : DomainSpec
    n : int                  cells per axis
    h : (3,) float           cell spacing per axis
    origin : (3,) float      low corner of the bounding box
    inside : (n,n,n) bool    cell-center membership mask
    points : (N,3) float     centers of inside cells, row-major order
    weights : (N,) float     per-cell quadrature weights (cell volume)
    index : (n,n,n) int      compact index of each cell, -1 if outside
    """

    def __init__(self, spec: DomainSpec, n: int):
        if n < 8:
            raise ValueError("grid resolution n must be at least 8")
        self.spec = spec
        self.n = int(n)
        lo = spec.bounding_lo
        hi = spec.bounding_hi
        self.origin = lo
        self.h = (hi - lo) / n
        axes = [lo[k] + (np.arange(n) + 0.5) * self.h[k] for k in range(3)]
        xx, yy, zz = np.meshgrid(*axes, indexing="ij")
        centers = np.stack([xx, yy, zz], axis=-1).reshape(-1, 3)
        mask = spec.contains(centers).reshape(n, n, n)
        if not mask.any():
            raise ValueError("degenerate domain: no cell center inside")
        self.inside = mask
        self.index = np.full((n, n, n), -1, dtype=np.int64)
        flat = np.flatnonzero(mask.ravel())
        self.index.ravel()[flat] = np.arange(flat.size)
        self.points = centers[flat]
        self.weights = np.full(flat.size, float(np.prod(self.h)))
        self._cells_ijk = np.stack(np.unravel_index(flat, (n, n, n)), axis=-1)
        self._neighbors = self._build_neighbors()

    @property
    def ncells(self) -> int:
        return self.points.shape[0]

    @property
    def h_max(self) -> float:
        return float(np.max(self.h))

    def _build_neighbors(self) -> np.ndarray:
        """(N, 3, 2) compact indices of (-,+) neighbors per axis, -1 if outside."""
        n = self.n
        ijk = self._cells_ijk
        out = np.full((self.ncells, 3, 2), -1, dtype=np.int64)
        for ax in range(3):
            for s, side in ((-1, 0), (+1, 1)):
                nb = ijk.copy()
                nb[:, ax] += s
                ok = (nb[:, ax] >= 0) & (nb[:, ax] < n)
                idx = np.full(self.ncells, -1, dtype=np.int64)
                idx[ok] = self.index[nb[ok, 0], nb[ok, 1], nb[ok, 2]]
                out[:, ax, side] = idx
        return out

    def boundary_distance(self) -> np.ndarray:
        return self.spec.boundary_distance(self.points)

    def interior_mask(self, margin: float | None = None) -> np.ndarray:
        """Cells at least `margin` from the boundary (default 2 h_max)."""
        if margin is None:
            margin = 2.0 * self.h_max
        return self.boundary_distance() >= margin

    def cell_of(self, x: np.ndarray) -> int:
        """Compact index of the cell whose center is nearest to x; -1 if outside."""
        ijk = np.floor((np.asarray(x, float) - self.origin) / self.h).astype(int)
        if np.any(ijk < 0) or np.any(ijk >= self.n):
            return -1
        return int(self.index[ijk[0], ijk[1], ijk[2]])

    def same_as(self, other: "DomainGrid") -> bool:
        return (
            self.n == other.n
            and self.spec.kind == other.spec.kind
            and np.array_equal(self.origin, other.origin)
            and np.array_equal(self.h, other.h)
            and self.ncells == other.ncells
        )


def build_grid(spec: DomainSpec, n: int) -> DomainGrid:
    return DomainGrid(spec, n)


def _check_same_grid(u: "BiquatField", v: "BiquatField") -> None:
    if u.grid is not v.grid and not u.grid.same_as(v.grid):
        raise GridMismatchError("fields live on different grids")


@dataclass
class BiquatField:
    """Biquaternion-valued function sampled at inside-cell centers.

    values has shape (N, 4) complex; stencil_order (optional) records the
    finite-difference order used per cell by operators that produce the
    field (2 central, 1 one-sided, 0 degenerate).
    """

    grid: DomainGrid
    values: np.ndarray
    stencil_order: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != (self.grid.ncells, 4):
            raise ValueError(
                f"values shape {self.values.shape} != ({self.grid.ncells}, 4)"
            )

    def copy(self) -> "BiquatField":
        return BiquatField(self.grid, self.values.copy())

    def __add__(self, other: "BiquatField") -> "BiquatField":
        _check_same_grid(self, other)
        return BiquatField(self.grid, self.values + other.values)

    def __sub__(self, other: "BiquatField") -> "BiquatField":
        _check_same_grid(self, other)
        return BiquatField(self.grid, self.values - other.values)

    def __mul__(self, z) -> "BiquatField":
        return BiquatField(self.grid, self.values * complex(z))

    __rmul__ = __mul__

    def __neg__(self) -> "BiquatField":
        return BiquatField(self.grid, -self.values)

    def right_mul(self, a: Biquaternion) -> "BiquatField":
        """Pointwise w(x) a for a constant biquaternion a."""
        return BiquatField(self.grid, bq_mul(self.values, a.array[None, :]))

    def left_mul(self, a: Biquaternion) -> "BiquatField":
        return BiquatField(self.grid, bq_mul(a.array[None, :], self.values))

    def bar(self) -> "BiquatField":
        return BiquatField(self.grid, bq_bar(self.values))

    def value_at(self, x: np.ndarray) -> Biquaternion:
        """Sample value at the cell containing x (midpoint semantics)."""
        c = self.grid.cell_of(x)
        if c < 0:
            raise ValueError(f"point {x} is outside the domain grid")
        return Biquaternion.from_array(self.values[c])

    def max_norm(self, mask: np.ndarray | None = None) -> float:
        norms = bq_norm(self.values)
        if mask is not None:
            norms = norms[mask]
        return float(np.max(norms)) if norms.size else 0.0


@dataclass
class ScalarField:
    """Complex scalar function sampled like a BiquatField component."""

    grid: DomainGrid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != (self.grid.ncells,):
            raise ValueError("scalar field shape mismatch")


def sample(fn, grid: DomainGrid) -> BiquatField:
    """Evaluate fn(point) -> Biquaternion | (4,) array at inside cells."""
    first = fn(grid.points[0])
    if isinstance(first, Biquaternion):
        vals = np.empty((grid.ncells, 4), dtype=complex)
        vals[0] = first.array
        for i in range(1, grid.ncells):
            vals[i] = fn(grid.points[i]).array
    else:
        vals = np.empty((grid.ncells, 4), dtype=complex)
        vals[0] = np.asarray(first, dtype=complex)
        for i in range(1, grid.ncells):
            vals[i] = np.asarray(fn(grid.points[i]), dtype=complex)
    return BiquatField(grid, vals)


def sample_vectorized(fn, grid: DomainGrid) -> BiquatField:
    """Like sample() but fn maps an (N,3) array to an (N,4) complex array."""
    return BiquatField(grid, np.asarray(fn(grid.points), dtype=complex))


def sample_scalar(fn, grid: DomainGrid) -> ScalarField:
    vals = np.array([fn(p) for p in grid.points], dtype=complex)
    return ScalarField(grid, vals)


# ---------------------------------------------------------------------------
# finite-difference operators


def _partial_component(grid: DomainGrid, comp: np.ndarray, axis: int):
    """d(comp)/dx_axis with central differences where both neighbors exist.

    Returns (derivative, order) with order 2 central, 1 one-sided, 0 none.
    """
    h = grid.h[axis]
    minus = grid._neighbors[:, axis, 0]
    plus = grid._neighbors[:, axis, 1]
    out = np.zeros_like(comp)
    order = np.zeros(grid.ncells, dtype=np.int8)

    both = (minus >= 0) & (plus >= 0)
    out[both] = (comp[plus[both]] - comp[minus[both]]) / (2.0 * h)
    order[both] = 2

    onlyp = (minus < 0) & (plus >= 0)
    out[onlyp] = (comp[plus[onlyp]] - comp[onlyp]) / h
    order[onlyp] = 1

    onlym = (minus >= 0) & (plus < 0)
    out[onlym] = (comp[onlym] - comp[minus[onlym]]) / h
    order[onlym] = 1
    return out, order


def apply_partial(u: BiquatField, axis: int) -> BiquatField:
    """Componentwise partial derivative along one axis."""
    vals = np.empty_like(u.values)
    order = np.full(u.grid.ncells, 2, dtype=np.int8)
    for k in range(4):
        vals[:, k], o = _partial_component(u.grid, u.values[:, k], axis)
        order = np.minimum(order, o)
    return BiquatField(u.grid, vals, stencil_order=order)


def _partials(u: BiquatField):
    """J[c][k] arrays with d u_c / d x_k, plus the per-cell stencil order."""
    grid = u.grid
    J = np.empty((4, 3, grid.ncells), dtype=complex)
    order = np.full(grid.ncells, 2, dtype=np.int8)
    for c in range(4):
        for k in range(3):
            J[c, k], o = _partial_component(grid, u.values[:, c], k)
            order = np.minimum(order, o)
    return J, order


def _assemble_D(J: np.ndarray, curl_sign: float) -> np.ndarray:
    """D u = -div uvec + grad u0 + curl_sign * curl uvec from partials."""
    vals = np.empty((J.shape[2], 4), dtype=complex)
    vals[:, 0] = -(J[1, 0] + J[2, 1] + J[3, 2])
    vals[:, 1] = J[0, 0] + curl_sign * (J[3, 1] - J[2, 2])
    vals[:, 2] = J[0, 1] + curl_sign * (J[1, 2] - J[3, 0])
    vals[:, 3] = J[0, 2] + curl_sign * (J[2, 0] - J[1, 1])
    return vals


def apply_D(u: BiquatField) -> BiquatField:
    """Left Moisil-Theodorescu operator: D u = -div uvec + grad u0 + curl uvec."""
    J, order = _partials(u)
    return BiquatField(u.grid, _assemble_D(J, +1.0), stencil_order=order)


def apply_D_right(u: BiquatField) -> BiquatField:
    """Right action u D = -div uvec + grad u0 - curl uvec."""
    J, order = _partials(u)
    return BiquatField(u.grid, _assemble_D(J, -1.0), stencil_order=order)


def _laplacian_component(grid: DomainGrid, comp: np.ndarray):
    out = np.zeros_like(comp)
    order = np.full(grid.ncells, 2, dtype=np.int8)
    for ax in range(3):
        h2 = grid.h[ax] ** 2
        minus = grid._neighbors[:, ax, 0]
        plus = grid._neighbors[:, ax, 1]
        both = (minus >= 0) & (plus >= 0)
        out[both] += (comp[plus[both]] - 2.0 * comp[both] + comp[minus[both]]) / h2
        order[~both] = 0
    return out, order


def laplacian(u):
    """7-point Laplacian; cells lacking a full stencil are flagged order 0."""
    if isinstance(u, ScalarField):
        vals, _ = _laplacian_component(u.grid, u.values)
        return ScalarField(u.grid, vals)
    vals = np.empty_like(u.values)
    order = np.full(u.grid.ncells, 2, dtype=np.int8)
    for k in range(4):
        vals[:, k], o = _laplacian_component(u.grid, u.values[:, k])
        order = np.minimum(order, o)
    return BiquatField(u.grid, vals, stencil_order=order)


# ---------------------------------------------------------------------------
# inner products and pairings


def l2_inner(u: BiquatField, v: BiquatField) -> complex:
    """Discrete L2 inner product, conjugate-linear in u."""
    _check_same_grid(u, v)
    return complex(np.sum(u.grid.weights * bq_inner(u.values, v.values)))


def l2_norm(u: BiquatField) -> float:
    return float(np.sqrt(np.sum(u.grid.weights * bq_norm(u.values) ** 2)))


def hc_inner(u: BiquatField, v: BiquatField) -> Biquaternion:
    """Right-module inner product: integral of u^dagger v (a biquaternion)."""
    _check_same_grid(u, v)
    prod = bq_mul(np.conj(bq_bar(u.values)), v.values)
    return Biquaternion.from_array(np.sum(u.grid.weights[:, None] * prod, axis=0))


def sc_pairing(u: BiquatField, v: BiquatField) -> complex:
    """Bilinear pairing: integral of Sc(u v) (no conjugation)."""
    _check_same_grid(u, v)
    prod0 = (
        u.values[:, 0] * v.values[:, 0]
        - u.values[:, 1] * v.values[:, 1]
        - u.values[:, 2] * v.values[:, 2]
        - u.values[:, 3] * v.values[:, 3]
    )
    return complex(np.sum(u.grid.weights * prod0))


# ---------------------------------------------------------------------------
# boundary mesh (ball only)


@dataclass
class SurfaceMesh:
    """Quadrature points on the boundary sphere with outward unit normals."""

    points: np.ndarray
    normals: np.ndarray
    areas: np.ndarray


def sphere_mesh(spec: DomainSpec, m: int) -> SurfaceMesh:
    """Fibonacci lattice with m points on the boundary of a ball domain."""
    if spec.kind != "ball":
        raise ValueError("boundary mesh is only defined for ball domains")
    if m < 100:
        raise ValueError("need at least 100 surface points")
    i = np.arange(m)
    z = 1.0 - 2.0 * (i + 0.5) / m
    phi = np.pi * (1.0 + np.sqrt(5.0)) * i
    rho = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    normals = np.stack([rho * np.cos(phi), rho * np.sin(phi), z], axis=-1)
    points = spec.center + spec.radius * normals
    areas = np.full(m, 4.0 * np.pi * spec.radius**2 / m)
    return SurfaceMesh(points=points, normals=normals, areas=areas)
