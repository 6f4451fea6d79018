"""Closed-form quaternionic calculus on symbolic expressions.

The factorization identities are algebraic in the derivatives of the data,
so they are checked with exact symbolic differentiation (sympy) evaluated
on the grid, never with finite differences.  A symbolic field is a list of
four sympy expressions in x1, x2, x3; the helpers below implement the
operator D, the Laplacian, and the quaternion product at that level.
"""

from __future__ import annotations

import numpy as np
import sympy as sp

X1, X2, X3 = sp.symbols("x1 x2 x3", real=True)
COORDS = (X1, X2, X3)

__all__ = [
    "X1",
    "X2",
    "X3",
    "COORDS",
    "sym_field",
    "sym_D",
    "sym_laplacian",
    "sym_mul",
    "sym_bar",
    "sym_grad",
    "evaluate_field",
    "evaluate_scalar",
]


def sym_field(c0=0, c1=0, c2=0, c3=0) -> list:
    return [sp.sympify(c) for c in (c0, c1, c2, c3)]


def sym_mul(p: list, q: list) -> list:
    p0, p1, p2, p3 = p
    q0, q1, q2, q3 = q
    return [
        sp.expand(p0 * q0 - p1 * q1 - p2 * q2 - p3 * q3),
        sp.expand(p0 * q1 + p1 * q0 + p2 * q3 - p3 * q2),
        sp.expand(p0 * q2 + p2 * q0 + p3 * q1 - p1 * q3),
        sp.expand(p0 * q3 + p3 * q0 + p1 * q2 - p2 * q1),
    ]


def sym_bar(p: list) -> list:
    return [p[0], -p[1], -p[2], -p[3]]


def sym_grad(f) -> list:
    """Gradient of a scalar as a purely vectorial quaternion."""
    f = sp.sympify(f)
    return [sp.Integer(0)] + [sp.diff(f, v) for v in COORDS]


def sym_D(u: list) -> list:
    """D u = -div uvec + grad u0 + curl uvec, symbolically."""
    J = [[sp.diff(c, v) for v in COORDS] for c in u]
    return [
        sp.expand(-(J[1][0] + J[2][1] + J[3][2])),
        sp.expand(J[0][0] + (J[3][1] - J[2][2])),
        sp.expand(J[0][1] + (J[1][2] - J[3][0])),
        sp.expand(J[0][2] + (J[2][0] - J[1][1])),
    ]


def sym_laplacian(u):
    if isinstance(u, (list, tuple)):
        return [sym_laplacian(c) for c in u]
    u = sp.sympify(u)
    return sp.expand(sum(sp.diff(u, v, 2) for v in COORDS))


def _lambdify(expr):
    return sp.lambdify(COORDS, expr, modules="numpy")


def evaluate_scalar(expr, pts: np.ndarray) -> np.ndarray:
    fn = _lambdify(sp.sympify(expr))
    out = fn(pts[:, 0], pts[:, 1], pts[:, 2])
    return np.broadcast_to(np.asarray(out, dtype=complex), (pts.shape[0],)).copy()


def evaluate_field(u: list, pts: np.ndarray) -> np.ndarray:
    """Evaluate a symbolic quaternion field at points; returns (N, 4) complex."""
    out = np.empty((pts.shape[0], 4), dtype=complex)
    for k in range(4):
        out[:, k] = evaluate_scalar(u[k], pts)
    return out
