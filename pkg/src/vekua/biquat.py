"""Biquaternion algebra: complex quaternions with units e0..e3.

Elements are stored as length-4 complex vectors (c0, c1, c2, c3) giving
p = c0 + c1 e1 + c2 e2 + c3 e3.  All array routines act on the last axis,
so fields of shape (..., 4) go through the same code path as single
elements.  The unit convention is the standard Hamilton one, e_j^2 = -1,
which is what the displayed product rule

    p q = p0 q0 + p0 qv + q0 pv - pv . qv + pv x qv

forces (the anticommutation relation with a +delta sign that sometimes
appears in print is inconsistent with that rule and is not used here).
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "Biquaternion",
    "E0",
    "E1",
    "E2",
    "E3",
    "bq_mul",
    "bq_bar",
    "bq_cconj",
    "bq_dagger",
    "bq_inner",
    "bq_norm",
    "classify_zero_divisor",
]

SQRT2 = np.sqrt(2.0)


def _as4(a) -> np.ndarray:
    arr = np.asarray(a, dtype=complex)
    if arr.shape[-1] != 4:
        raise ValueError(f"expected last axis of size 4, got shape {arr.shape}")
    return arr


def bq_mul(p, q) -> np.ndarray:
    """Quaternion product on the last axis, broadcasting over the rest."""
    p = _as4(p)
    q = _as4(q)
    p0, p1, p2, p3 = p[..., 0], p[..., 1], p[..., 2], p[..., 3]
    q0, q1, q2, q3 = q[..., 0], q[..., 1], q[..., 2], q[..., 3]
    return np.stack(
        [
            p0 * q0 - p1 * q1 - p2 * q2 - p3 * q3,
            p0 * q1 + p1 * q0 + p2 * q3 - p3 * q2,
            p0 * q2 + p2 * q0 + p3 * q1 - p1 * q3,
            p0 * q3 + p3 * q0 + p1 * q2 - p2 * q1,
        ],
        axis=-1,
    )


def bq_bar(p) -> np.ndarray:
    """Quaternionic conjugate: scalar part kept, vector part negated."""
    p = _as4(p)
    out = -p.copy()
    out[..., 0] = p[..., 0]
    return out


def bq_cconj(p) -> np.ndarray:
    """Componentwise complex conjugate."""
    return np.conj(_as4(p))


def bq_dagger(p) -> np.ndarray:
    """Combined conjugation p0* - (vector part)*; an involution."""
    return bq_bar(bq_cconj(p))


def bq_inner(p, q) -> np.ndarray:
    """Hermitian inner product Sc(p^dagger q) = sum_k p_k* q_k.

    Conjugate-linear in the first argument.  Returns complex scalars with
    the last axis contracted away.
    """
    return np.sum(np.conj(_as4(p)) * _as4(q), axis=-1)


def bq_norm(p) -> np.ndarray:
    """Euclidean norm sqrt(sum |c_k|^2)."""
    p = _as4(p)
    return np.sqrt(np.sum(np.abs(p) ** 2, axis=-1))


def classify_zero_divisor(p, tol: float = 1e-10) -> str:
    """Classify p as 'zero', 'zero_divisor' or 'invertible'.

    A nonzero p is a zero divisor iff p * bar(p) = 0, i.e. p0^2 equals the
    quaternion square of the vector part.  The test is relative: we compare
    |p bar(p)| against tol * |p|^2.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    p = _as4(p)
    n = float(bq_norm(p))
    if n <= tol:
        return "zero"
    ppbar = bq_mul(p, bq_bar(p))  # scalar: p0^2 - (p1^2+p2^2+p3^2)*(-1)... = p0^2 - pvec^2
    if abs(ppbar[..., 0]) <= tol * n * n:
        return "zero_divisor"
    return "invertible"


def _left_mul_matrix(p) -> np.ndarray:
    """4x4 complex matrix of q -> p q (left-regular representation).

    Internal test oracle only.
    """
    p = _as4(p)
    p0, p1, p2, p3 = p
    return np.array(
        [
            [p0, -p1, -p2, -p3],
            [p1, p0, -p3, p2],
            [p2, p3, p0, -p1],
            [p3, -p2, p1, p0],
        ],
        dtype=complex,
    )


class Biquaternion:
    """A single biquaternion.  Thin immutable wrapper over a (4,) array."""

    __slots__ = ("_c",)

    def __init__(self, c0=0, c1=0, c2=0, c3=0):
        self._c = np.array([c0, c1, c2, c3], dtype=complex)
        self._c.setflags(write=False)

    @classmethod
    def from_array(cls, arr) -> "Biquaternion":
        arr = _as4(arr)
        return cls(arr[0], arr[1], arr[2], arr[3])

    @classmethod
    def scalar(cls, z) -> "Biquaternion":
        return cls(z, 0, 0, 0)

    @classmethod
    def vector(cls, v) -> "Biquaternion":
        v = np.asarray(v, dtype=complex)
        return cls(0, v[0], v[1], v[2])

    @property
    def array(self) -> np.ndarray:
        return self._c

    @property
    def c0(self) -> complex:
        return complex(self._c[0])

    @property
    def c1(self) -> complex:
        return complex(self._c[1])

    @property
    def c2(self) -> complex:
        return complex(self._c[2])

    @property
    def c3(self) -> complex:
        return complex(self._c[3])

    @property
    def sc(self) -> complex:
        """Scalar part."""
        return complex(self._c[0])

    @property
    def vec(self) -> np.ndarray:
        """Vector part as a length-3 complex array."""
        return self._c[1:].copy()

    def bar(self) -> "Biquaternion":
        return Biquaternion.from_array(bq_bar(self._c))

    def cconj(self) -> "Biquaternion":
        return Biquaternion.from_array(bq_cconj(self._c))

    def dagger(self) -> "Biquaternion":
        return Biquaternion.from_array(bq_dagger(self._c))

    def norm(self) -> float:
        return float(bq_norm(self._c))

    def inner(self, other: "Biquaternion") -> complex:
        return complex(bq_inner(self._c, other._c))

    def classify(self, tol: float = 1e-10) -> str:
        return classify_zero_divisor(self._c, tol)

    def __mul__(self, other):
        if isinstance(other, Biquaternion):
            return Biquaternion.from_array(bq_mul(self._c, other._c))
        return Biquaternion.from_array(self._c * complex(other))

    def __rmul__(self, other):
        # other is a complex scalar here; Biquaternion*Biquaternion hits __mul__
        return Biquaternion.from_array(complex(other) * self._c)

    def __add__(self, other):
        if isinstance(other, Biquaternion):
            return Biquaternion.from_array(self._c + other._c)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, Biquaternion):
            return Biquaternion.from_array(self._c - other._c)
        return NotImplemented

    def __neg__(self):
        return Biquaternion.from_array(-self._c)

    def __eq__(self, other):
        if isinstance(other, Biquaternion):
            return bool(np.array_equal(self._c, other._c))
        return NotImplemented

    def __hash__(self):
        return hash(self._c.tobytes())

    def isclose(self, other: "Biquaternion", tol: float = 1e-12) -> bool:
        return float(bq_norm(self._c - other._c)) <= tol * max(1.0, self.norm())

    def __repr__(self):
        return f"Biquaternion({self.c0}, {self.c1}, {self.c2}, {self.c3})"


E0 = Biquaternion(1, 0, 0, 0)
E1 = Biquaternion(0, 1, 0, 0)
E2 = Biquaternion(0, 0, 1, 0)
E3 = Biquaternion(0, 0, 0, 1)
