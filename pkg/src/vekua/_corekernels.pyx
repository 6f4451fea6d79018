# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled volume-potential kernels.

Same contracts as vekua._kernels_np: pairwise sums over (target, source)
with coincident pairs skipped.  Sources are walked in ascending index order
for every target, so results do not depend on the thread count.  Source
tiling keeps the streamed field block cache-resident when many fields are
transformed at once.

The E and Newton kernels are real, so the real and imaginary parts of the
fields ride along as independent real columns; only the Helmholtz kernel
needs complex cross terms, written out in real arithmetic for speed.
"""

import numpy as np

from cython.parallel cimport prange
from libc.math cimport cos, exp, sin, sqrt

cdef double FOURPI = 4.0 * 3.14159265358979323846


cdef inline Py_ssize_t _tile(Py_ssize_t bytes_per_source) noexcept nogil:
    cdef Py_ssize_t t = 524288 / bytes_per_source
    if t < 64:
        t = 64
    return t


def teo_apply_real(double[:, ::1] tpts, double[:, ::1] spts, double[::1] w,
                   double[:, :, ::1] u):
    """E-kernel sum on real column stacks: u (N, 4, K) -> (T, 4, K)."""
    cdef Py_ssize_t t = tpts.shape[0]
    cdef Py_ssize_t n = spts.shape[0]
    cdef Py_ssize_t m = u.shape[2]
    out_arr = np.zeros((t, 4, m), dtype=np.float64)
    cdef double[:, :, ::1] out = out_arr
    cdef Py_ssize_t i, j, k, j0, j1
    cdef Py_ssize_t tile = _tile(32 * m + 24)
    cdef double px, py, pz, dx, dy, dz, r2, f, vx, vy, vz
    cdef double u0, u1, u2, u3

    for j0 in range(0, n, tile):
        j1 = min(j0 + tile, n)
        for i in prange(t, nogil=True, schedule='static'):
            px = tpts[i, 0]; py = tpts[i, 1]; pz = tpts[i, 2]
            for j in range(j0, j1):
                dx = spts[j, 0] - px
                dy = spts[j, 1] - py
                dz = spts[j, 2] - pz
                r2 = dx * dx + dy * dy + dz * dz
                if r2 <= 0.0:
                    continue
                f = w[j] / (FOURPI * r2 * sqrt(r2))
                vx = dx * f; vy = dy * f; vz = dz * f
                for k in range(m):
                    u0 = u[j, 0, k]; u1 = u[j, 1, k]
                    u2 = u[j, 2, k]; u3 = u[j, 3, k]
                    out[i, 0, k] += -(vx * u1 + vy * u2 + vz * u3)
                    out[i, 1, k] += vx * u0 + vy * u3 - vz * u2
                    out[i, 2, k] += vy * u0 + vz * u1 - vx * u3
                    out[i, 3, k] += vz * u0 + vx * u2 - vy * u1
    return out_arr


def newton_apply_real(double[:, ::1] tpts, double[:, ::1] spts, double[::1] w,
                      double[:, :, ::1] u):
    """1/(4 pi r) sum on real column stacks, componentwise."""
    cdef Py_ssize_t t = tpts.shape[0]
    cdef Py_ssize_t n = spts.shape[0]
    cdef Py_ssize_t m = u.shape[2]
    out_arr = np.zeros((t, 4, m), dtype=np.float64)
    cdef double[:, :, ::1] out = out_arr
    cdef Py_ssize_t i, j, k, c, j0, j1
    cdef Py_ssize_t tile = _tile(32 * m + 24)
    cdef double px, py, pz, dx, dy, dz, r2, g

    for j0 in range(0, n, tile):
        j1 = min(j0 + tile, n)
        for i in prange(t, nogil=True, schedule='static'):
            px = tpts[i, 0]; py = tpts[i, 1]; pz = tpts[i, 2]
            for j in range(j0, j1):
                dx = spts[j, 0] - px
                dy = spts[j, 1] - py
                dz = spts[j, 2] - pz
                r2 = dx * dx + dy * dy + dz * dz
                if r2 <= 0.0:
                    continue
                g = w[j] / (FOURPI * sqrt(r2))
                for c in range(4):
                    for k in range(m):
                        out[i, c, k] += g * u[j, c, k]
    return out_arr


def helm_apply_split(double[:, ::1] tpts, double[:, ::1] spts, double[::1] w,
                     double[:, :, ::1] ur, double[:, :, ::1] ui,
                     double ar, double ai, double cr, double ci, bint deriv):
    """Helmholtz-kernel sum, complex handled as explicit re/im pairs.

    Kernel K_c(z) = env * (c/r + (1/r^3 - i alpha/r^2) zvec), or for the
    c-derivative env * (i c + 1/r + (c/r) zvec), env = -e^{i alpha r}/4pi.
    Returns (out_re, out_im), each (T, 4, M).
    """
    cdef Py_ssize_t t = tpts.shape[0]
    cdef Py_ssize_t n = spts.shape[0]
    cdef Py_ssize_t m = ur.shape[2]
    outr_arr = np.zeros((t, 4, m), dtype=np.float64)
    outi_arr = np.zeros((t, 4, m), dtype=np.float64)
    cdef double[:, :, ::1] outr = outr_arr
    cdef double[:, :, ::1] outi = outi_arr
    cdef Py_ssize_t i, j, k, j0, j1
    cdef Py_ssize_t tile = _tile(64 * m + 24)
    cdef double px, py, pz, zx, zy, zz, r2, r, inv_r, inv_r2
    cdef double envr, envi, mag, ph, tr, ti
    cdef double apr, api, bpr, bpi
    cdef double bxr, bxi, byr, byi, bzr, bzi
    cdef double u0r, u0i, u1r, u1i, u2r, u2i, u3r, u3i

    for j0 in range(0, n, tile):
        j1 = min(j0 + tile, n)
        for i in prange(t, nogil=True, schedule='static'):
            px = tpts[i, 0]; py = tpts[i, 1]; pz = tpts[i, 2]
            for j in range(j0, j1):
                zx = px - spts[j, 0]
                zy = py - spts[j, 1]
                zz = pz - spts[j, 2]
                r2 = zx * zx + zy * zy + zz * zz
                if r2 <= 0.0:
                    continue
                r = sqrt(r2)
                inv_r = 1.0 / r
                inv_r2 = 1.0 / r2
                # env = -(w_j/4pi) e^{i alpha r}
                mag = -(w[j] / FOURPI) * exp(-ai * r)
                ph = ar * r
                envr = mag * cos(ph)
                envi = mag * sin(ph)
                if deriv:
                    # a-profile: env * (i c + 1/r)
                    tr = inv_r - ci
                    ti = cr
                    apr = envr * tr - envi * ti
                    api = envr * ti + envi * tr
                    # b-profile: env * c / r
                    bpr = (envr * cr - envi * ci) * inv_r
                    bpi = (envr * ci + envi * cr) * inv_r
                else:
                    # a-profile: env * c / r
                    apr = (envr * cr - envi * ci) * inv_r
                    api = (envr * ci + envi * cr) * inv_r
                    # b-profile: env * (1/r^3 - i alpha / r^2)
                    tr = inv_r2 * inv_r + ai * inv_r2
                    ti = -ar * inv_r2
                    bpr = envr * tr - envi * ti
                    bpi = envr * ti + envi * tr
                bxr = zx * bpr; bxi = zx * bpi
                byr = zy * bpr; byi = zy * bpi
                bzr = zz * bpr; bzi = zz * bpi
                for k in range(m):
                    u0r = ur[j, 0, k]; u0i = ui[j, 0, k]
                    u1r = ur[j, 1, k]; u1i = ui[j, 1, k]
                    u2r = ur[j, 2, k]; u2i = ui[j, 2, k]
                    u3r = ur[j, 3, k]; u3i = ui[j, 3, k]
                    outr[i, 0, k] += apr * u0r - api * u0i - (
                        bxr * u1r - bxi * u1i + byr * u2r - byi * u2i + bzr * u3r - bzi * u3i)
                    outi[i, 0, k] += apr * u0i + api * u0r - (
                        bxr * u1i + bxi * u1r + byr * u2i + byi * u2r + bzr * u3i + bzi * u3r)
                    outr[i, 1, k] += apr * u1r - api * u1i + (
                        bxr * u0r - bxi * u0i + byr * u3r - byi * u3i - bzr * u2r + bzi * u2i)
                    outi[i, 1, k] += apr * u1i + api * u1r + (
                        bxr * u0i + bxi * u0r + byr * u3i + byi * u3r - bzr * u2i - bzi * u2r)
                    outr[i, 2, k] += apr * u2r - api * u2i + (
                        byr * u0r - byi * u0i + bzr * u1r - bzi * u1i - bxr * u3r + bxi * u3i)
                    outi[i, 2, k] += apr * u2i + api * u2r + (
                        byr * u0i + byi * u0r + bzr * u1i + bzi * u1r - bxr * u3i - bxi * u3r)
                    outr[i, 3, k] += apr * u3r - api * u3i + (
                        bzr * u0r - bzi * u0i + bxr * u2r - bxi * u2i - byr * u1r + byi * u1i)
                    outi[i, 3, k] += apr * u3i + api * u3r + (
                        bzr * u0i + bzi * u0r + bxr * u2i + bxi * u2r - byr * u1i - byi * u1r)
    return outr_arr, outi_arr


# complex-array wrappers with the backend-level interface


def teo_apply(tpts, spts, w, u):
    n, _, m = u.shape
    stacked = np.empty((n, 4, 2 * m), dtype=np.float64)
    stacked[:, :, :m] = u.real
    stacked[:, :, m:] = u.imag
    raw = teo_apply_real(tpts, spts, w, stacked)
    return raw[:, :, :m] + 1j * raw[:, :, m:]


def newton_apply(tpts, spts, w, u):
    n, _, m = u.shape
    stacked = np.empty((n, 4, 2 * m), dtype=np.float64)
    stacked[:, :, :m] = u.real
    stacked[:, :, m:] = u.imag
    raw = newton_apply_real(tpts, spts, w, stacked)
    return raw[:, :, :m] + 1j * raw[:, :, m:]


def helm_apply(tpts, spts, w, u, alpha, c, deriv):
    ur = np.ascontiguousarray(u.real)
    ui = np.ascontiguousarray(u.imag)
    alpha = complex(alpha)
    c = complex(c)
    outr, outi = helm_apply_split(
        tpts, spts, w, ur, ui, alpha.real, alpha.imag, c.real, c.imag, bool(deriv)
    )
    return outr + 1j * outi
