"""Pure NumPy implementation of the O(N^2) volume-potential kernels.

Targets are processed in blocks; for each block the pairwise kernel factors
are assembled as (block, N) matrices and contracted against the stacked
field components with BLAS matmuls.  Pairs with coincident points (the
singular self pairs) contribute zero here; analytic self-cell corrections
are added by the callers where the kernel requires one.

Results are deterministic for fixed inputs: the reduction order inside a
matmul is fixed by NumPy/BLAS for a given shape, and the block partition
depends only on the problem size.
"""

from __future__ import annotations

import numpy as np

FOURPI = 4.0 * np.pi

# target-block sizing: keep the (block, N) scratch matrices around 200 MB
_PAIR_BUDGET = 5_000_000


def _block_size(n_sources: int, n_targets: int) -> int:
    return max(8, min(n_targets, _PAIR_BUDGET // max(n_sources, 1)))


def _split_columns(u2: np.ndarray) -> np.ndarray:
    """Complex (N,K) -> contiguous real (N,2K) with re and im column blocks.

    BLAS needs contiguous operands; multiplying against a strided .real view
    silently falls off the fast path.
    """
    n, k = u2.shape
    out = np.empty((n, 2 * k), dtype=np.float64)
    out[:, :k] = u2.real
    out[:, k:] = u2.imag
    return out


def _join_columns(raw: np.ndarray) -> np.ndarray:
    k = raw.shape[-1] // 2
    return raw[..., :k] + 1j * raw[..., k:]


def teo_apply(tpts, spts, w, u):
    """Theodorescu sum: out(x_i) = sum_j w_j * v_ij u_j with
    v_ij = (s_j - t_i) / (4 pi |s_j - t_i|^3) acting by quaternion product.

    u has shape (N, 4, M); returns (T, 4, M).
    """
    tpts = np.ascontiguousarray(tpts, dtype=float)
    spts = np.ascontiguousarray(spts, dtype=float)
    w = np.ascontiguousarray(w, dtype=float)
    u = np.ascontiguousarray(u, dtype=complex)
    n, _, m = u.shape
    t = tpts.shape[0]
    u2 = _split_columns(u.reshape(n, 4 * m))  # (N, 8M) real
    out = np.empty((t, 4, m), dtype=complex)
    bs = _block_size(n, t)
    for b0 in range(0, t, bs):
        b1 = min(b0 + bs, t)
        d = spts[None, :, :] - tpts[b0:b1, None, :]  # (B, N, 3)
        r2 = np.einsum("bnk,bnk->bn", d, d)
        with np.errstate(divide="ignore", invalid="ignore"):
            f = np.where(r2 > 0.0, w[None, :] / (FOURPI * r2 * np.sqrt(r2)), 0.0)
        g = np.concatenate(
            [d[:, :, 0] * f, d[:, :, 1] * f, d[:, :, 2] * f], axis=0
        )  # (3B, N)
        s = _join_columns(g @ u2).reshape(3, b1 - b0, 4, m)
        sx, sy, sz = s[0], s[1], s[2]
        out[b0:b1, 0] = -(sx[:, 1] + sy[:, 2] + sz[:, 3])
        out[b0:b1, 1] = sx[:, 0] + sy[:, 3] - sz[:, 2]
        out[b0:b1, 2] = sy[:, 0] + sz[:, 1] - sx[:, 3]
        out[b0:b1, 3] = sz[:, 0] + sx[:, 2] - sy[:, 1]
    return out


def newton_apply(tpts, spts, w, u):
    """Newtonian sum: out(x_i) = sum_j w_j u_j / (4 pi |t_i - s_j|), componentwise."""
    tpts = np.ascontiguousarray(tpts, dtype=float)
    spts = np.ascontiguousarray(spts, dtype=float)
    w = np.ascontiguousarray(w, dtype=float)
    u = np.ascontiguousarray(u, dtype=complex)
    n, _, m = u.shape
    t = tpts.shape[0]
    u2 = _split_columns(u.reshape(n, 4 * m))
    out = np.empty((t, 4, m), dtype=complex)
    bs = _block_size(n, t)
    for b0 in range(0, t, bs):
        b1 = min(b0 + bs, t)
        d = spts[None, :, :] - tpts[b0:b1, None, :]
        r2 = np.einsum("bnk,bnk->bn", d, d)
        with np.errstate(divide="ignore", invalid="ignore"):
            g = np.where(r2 > 0.0, w[None, :] / (FOURPI * np.sqrt(r2)), 0.0)
        out[b0:b1] = _join_columns(g @ u2).reshape(b1 - b0, 4, m)
    return out


def helm_apply(tpts, spts, w, u, alpha, c, deriv):
    """Helmholtz-type sum with kernel K_c(t - s) (or its d/dc for deriv=True).

    K_c(z) = -e^{i alpha r}/(4 pi) * ( c/r  +  (1/r^3 - i alpha/r^2) zvec )
    dK_c/dc (analytic family alpha == c)
           = -e^{i c r}/(4 pi) * ( i c + 1/r  +  (c/r) zvec )
    """
    tpts = np.ascontiguousarray(tpts, dtype=float)
    spts = np.ascontiguousarray(spts, dtype=float)
    w = np.ascontiguousarray(w, dtype=float)
    u = np.ascontiguousarray(u, dtype=complex)
    alpha = complex(alpha)
    c = complex(c)
    n, _, m = u.shape
    t = tpts.shape[0]
    u2 = u.reshape(n, 4 * m)
    out = np.empty((t, 4, m), dtype=complex)
    bs = max(8, _block_size(n, t) // 2)
    for b0 in range(0, t, bs):
        b1 = min(b0 + bs, t)
        z = tpts[b0:b1, None, :] - spts[None, :, :]  # kernel argument t - s
        r2 = np.einsum("bnk,bnk->bn", z, z)
        live = r2 > 0.0
        with np.errstate(divide="ignore", invalid="ignore"):
            r = np.sqrt(r2)
            env = np.where(live, -np.exp(1j * alpha * r) / FOURPI * w[None, :], 0.0)
            if deriv:
                a_prof = np.where(live, env * (1j * c + 1.0 / r), 0.0)
                b_prof = np.where(live, env * (c / r), 0.0)
            else:
                a_prof = np.where(live, env * (c / r), 0.0)
                b_prof = np.where(live, env * (1.0 / (r2 * r) - 1j * alpha / r2), 0.0)
        g = np.concatenate(
            [a_prof, z[:, :, 0] * b_prof, z[:, :, 1] * b_prof, z[:, :, 2] * b_prof],
            axis=0,
        )
        s = (g @ u2).reshape(4, b1 - b0, 4, m)
        sa, sx, sy, sz = s[0], s[1], s[2], s[3]
        out[b0:b1, 0] = sa[:, 0] - (sx[:, 1] + sy[:, 2] + sz[:, 3])
        out[b0:b1, 1] = sa[:, 1] + sx[:, 0] + sy[:, 3] - sz[:, 2]
        out[b0:b1, 2] = sa[:, 2] + sy[:, 0] + sz[:, 1] - sx[:, 3]
        out[b0:b1, 3] = sa[:, 3] + sz[:, 0] + sx[:, 2] - sy[:, 1]
    return out
