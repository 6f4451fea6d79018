"""Finite-dimensional model of the solution space and its reproducing kernel.

The space of L2 solutions of D w = Q_A w is modeled by a finite orthonormal
family: Cauchy kernels centered at exterior points give monogenic fields,
which are transported into the solution space by inverting w - T Q_A w,
then orthonormalized.  Componentwise reproducing kernels, the full kernel,
the orthogonal projection, and the right-module kernel (when the structure
exists) are all expansions over that family, so the reproduction identities
hold to roundoff on the span; quadrature enters only through how well the
span approximates held-out solutions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .biquat import Biquaternion, bq_dagger, bq_mul, bq_norm
from .grid import BiquatField, DomainGrid, DomainSpec, l2_inner, l2_norm
from .potentials import (
    CoefficientTuple,
    _neumann_stack,
    cauchy_kernel,
    default_vekua_tol,
)

__all__ = [
    "ModuleStructureAbsent",
    "OrthonormalBasis",
    "exterior_points",
    "monogenic_basis",
    "vekua_basis",
    "gram_schmidt",
    "gram_matrix",
    "kernel_component",
    "kernel_matrix",
    "bergman_kernel",
    "bergman_project",
    "module_kernel",
]


class ModuleStructureAbsent(RuntimeError):
    """The coefficient tuple does not leave the solution space right-module closed."""


def exterior_points(spec: DomainSpec, m: int, scale: float = 1.5) -> np.ndarray:
    """m Fibonacci-lattice points on the sphere of radius scale * circumradius.

    All points lie strictly outside the closed domain (scale > 1 required).
    """
    if m < 1:
        raise ValueError("need at least one exterior point")
    if scale <= 1.0:
        raise ValueError("scale must exceed 1 so the points are exterior")
    i = np.arange(m)
    z = 1.0 - 2.0 * (i + 0.5) / m
    phi = np.pi * (1.0 + np.sqrt(5.0)) * i
    rho = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    dirs = np.stack([rho * np.cos(phi), rho * np.sin(phi), z], axis=-1)
    return spec.domain_center() + scale * spec.circumradius() * dirs


def monogenic_basis(grid: DomainGrid, points: np.ndarray) -> list[BiquatField]:
    """Fields E(. - q) e_j, j = 0..3, for each exterior point q.

    Each group of four shares one normalization constant (the L2 norm of
    E(. - q)), so spans and the per-point right-module structure are
    unchanged while the Gram matrix stays well scaled.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if np.any(grid.spec.contains(points)):
        raise ValueError("exterior points must lie outside the domain")
    fields = []
    units = np.eye(4, dtype=complex)
    for q in points:
        d = grid.points - q[None, :]
        r = np.linalg.norm(d, axis=1)
        ev = np.zeros((grid.ncells, 4), dtype=complex)
        ev[:, 1:] = -d / (4.0 * np.pi * r[:, None] ** 3)
        base = BiquatField(grid, ev)
        nrm = l2_norm(base)
        for j in range(4):
            fields.append(
                BiquatField(grid, bq_mul(ev / nrm, units[j][None, :]))
            )
    return fields


def vekua_basis(
    A: CoefficientTuple,
    mono: list[BiquatField],
    tol: float = 1e-10,
    max_iter: int = 200,
) -> list[BiquatField]:
    """Transport monogenic fields into the solution space via (S_G^A)^{-1}.

    Solves w - T Q_A w = h for every h at once (shared kernel sums); with
    A = 0 this is the identity.
    """
    if not mono:
        return []
    grid = mono[0].grid
    if A.is_zero():
        return [f.copy() for f in mono]
    stack = np.stack([f.values for f in mono])
    out, _ = _neumann_stack(A, grid, stack, tol, max_iter)
    return [BiquatField(grid, out[i]) for i in range(out.shape[0])]


def gram_matrix(fields: list[BiquatField]) -> np.ndarray:
    n = len(fields)
    w = fields[0].grid.weights
    vals = np.stack([f.values for f in fields])  # (n, N, 4)
    flat = vals.reshape(n, -1) * np.sqrt(np.repeat(w, 4))[None, :]
    return np.conj(flat) @ flat.T


@dataclass
class OrthonormalBasis:
    """Orthonormal family in the discretized space, with provenance."""

    members: list[BiquatField]
    gram_residual: float
    source: dict = field(default_factory=dict)
    dropped: list[int] = field(default_factory=list)

    @property
    def grid(self) -> DomainGrid:
        return self.members[0].grid

    def __len__(self) -> int:
        return len(self.members)

    def coefficients(self, u: BiquatField) -> np.ndarray:
        """Fourier coefficients <phi_n, u> of u against the family."""
        return np.array([l2_inner(phi, u) for phi in self.members])

    def combine(self, coeffs: np.ndarray) -> BiquatField:
        vals = np.tensordot(coeffs, np.stack([f.values for f in self.members]), axes=(0, 0))
        return BiquatField(self.grid, vals)

    def values_at_cell(self, cell: int) -> np.ndarray:
        """(n_members, 4) member values at one grid cell."""
        return np.stack([f.values[cell] for f in self.members])


def gram_schmidt(
    fields: list[BiquatField],
    drop_tol: float = 1e-10,
    source: dict | None = None,
) -> OrthonormalBasis:
    """Modified Gram-Schmidt with one reorthogonalization pass.

    Members whose post-projection norm falls below drop_tol times their
    original norm are dropped as rank-deficient; their indices are recorded.
    """
    if not fields:
        raise ValueError("gram_schmidt needs at least one field")
    kept: list[BiquatField] = []
    dropped: list[int] = []
    for idx, f in enumerate(fields):
        v = f.copy()
        orig = l2_norm(v)
        if orig == 0.0:
            dropped.append(idx)
            continue
        for _ in range(2):  # MGS + one reorthogonalization pass
            for phi in kept:
                v = v - phi * l2_inner(phi, v)
        nrm = l2_norm(v)
        if nrm < drop_tol * orig:
            dropped.append(idx)
            continue
        kept.append(v * (1.0 / nrm))
    if not kept:
        raise ValueError("all input fields are numerically zero or dependent")
    G = gram_matrix(kept)
    resid = float(np.max(np.abs(G - np.eye(len(kept)))))
    return OrthonormalBasis(
        members=kept, gram_residual=resid, source=source or {}, dropped=dropped
    )


def _require_interior_cell(basis: OrthonormalBasis, x) -> int:
    grid = basis.grid
    x = np.asarray(x, dtype=float)
    cell = grid.cell_of(x)
    if cell < 0:
        raise ValueError(f"point {x} is outside the domain")
    if grid.boundary_distance()[cell] < 2.0 * grid.h_max:
        raise ValueError("kernel evaluation needs an interior point (margin 2h)")
    return cell


def kernel_component(basis: OrthonormalBasis, x, k: int) -> BiquatField:
    """Reproducer of the k-th component at x: sum_n phi_n conj(phi_{n,k}(x)).

    For any w in the span, <K_x^k, w> equals w_k(x) up to roundoff.
    """
    if k not in (0, 1, 2, 3):
        raise ValueError("component index must be 0..3")
    cell = _require_interior_cell(basis, x)
    at_x = basis.values_at_cell(cell)  # (n, 4)
    coeffs = np.conj(at_x[:, k])
    return basis.combine(coeffs)


def kernel_matrix(basis: OrthonormalBasis, x, t) -> np.ndarray:
    """4x4 matrix K_x^{k,j}(t): j-component of K_x^k evaluated at t.

    Hermitian under the swap (x,k) <-> (t,j) with a positive diagonal at
    x = t.
    """
    cx = _require_interior_cell(basis, x)
    ct = _require_interior_cell(basis, t)
    at_x = basis.values_at_cell(cx)
    at_t = basis.values_at_cell(ct)
    # entry (k, j) = sum_n phi_{n,j}(t) conj(phi_{n,k}(x))
    return np.einsum("nk,nj->kj", np.conj(at_x), at_t)


def bergman_kernel(basis: OrthonormalBasis, x, t, a: Biquaternion) -> Biquaternion:
    """Kernel value sum_n phi_n(x) <phi_n(t), a>."""
    cx = _require_interior_cell(basis, x)
    ct = _require_interior_cell(basis, t)
    at_x = basis.values_at_cell(cx)
    at_t = basis.values_at_cell(ct)
    coeffs = np.conj(at_t) @ a.array  # <phi_n(t), a>
    return Biquaternion.from_array(coeffs @ at_x)


def bergman_project(basis: OrthonormalBasis, u: BiquatField) -> BiquatField:
    """Orthogonal projection onto the span: sum_n phi_n <phi_n, u>."""
    return basis.combine(basis.coefficients(u))


def _has_module_structure(A: CoefficientTuple) -> bool:
    """Structural right-module test: only the left coefficient may act.

    Right multiplication by constants commutes with D and with left
    multiplication, so a1 = a2 = a4 = 0 (a3 arbitrary) keeps the solution
    space a right module; a conjugating or right-multiplying coefficient
    breaks it in general.
    """
    b = A.ess_sup_bounds
    return b[0] == 0.0 and b[1] == 0.0 and b[3] == 0.0


def module_kernel_residuals(
    A: CoefficientTuple, basis: OrthonormalBasis, tol: float | None = None
) -> list[float]:
    """Vekua residuals of w a for sample members w and units a (diagnostic)."""
    from .potentials import vekua_residual

    units = [Biquaternion(0, 1, 0, 0), Biquaternion(0, 0, 1, 0),
             Biquaternion(0, 0, 0, 1), Biquaternion(1j, 0, 0, 0)]
    out = []
    for wfield in basis.members[: min(3, len(basis.members))]:
        for a in units:
            out.append(vekua_residual(A, wfield.right_mul(a)))
    return out


def module_kernel(
    basis: OrthonormalBasis, A: CoefficientTuple, x, t
) -> Biquaternion:
    """Right-module reproducing kernel value: dagger of K_x^0 evaluated at t.

    Reproduces span members through the quaternionic pairing,
    w(x) ~= sum_cells weight * kernel(x, t) w(t).  Raises
    ModuleStructureAbsent unless the coefficient tuple is of right-module
    type (a1 = a2 = a4 = 0).
    """
    if not _has_module_structure(A):
        raise ModuleStructureAbsent(
            "right-module kernel needs a1 = a2 = a4 = 0 (left coefficient only)"
        )
    k0 = kernel_component(basis, x, 0)
    ct = _require_interior_cell(basis, t)
    return Biquaternion.from_array(bq_dagger(k0.values[ct]))


def module_reproduce(basis: OrthonormalBasis, A: CoefficientTuple, w: BiquatField, x) -> Biquaternion:
    """Integral of module_kernel(x, t) w(t) over t (quadrature sum)."""
    if not _has_module_structure(A):
        raise ModuleStructureAbsent(
            "right-module kernel needs a1 = a2 = a4 = 0 (left coefficient only)"
        )
    k0 = kernel_component(basis, x, 0)
    kern = bq_dagger(k0.values)  # (N, 4): kernel(x, t) over all t
    prod = bq_mul(kern, w.values)
    return Biquaternion.from_array(
        np.sum(w.grid.weights[:, None] * prod, axis=0)
    )
