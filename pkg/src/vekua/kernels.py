"""Backend selection for the O(N^2) volume-potential kernels.

The compiled extension (vekua._corekernels, Cython + OpenMP) is used when
it imported successfully; otherwise the blocked NumPy implementation takes
over.  Set VEKUA_BACKEND=pure or =compiled to force a choice ("compiled"
raises if the extension is unavailable).  Both backends implement the same
contracts and agree to roundoff; see benchmarks/bench_kernels.py for a
side-by-side timing.
"""

from __future__ import annotations

import os

import numpy as np

from . import _kernels_np

try:
    from . import _corekernels

    _HAVE_COMPILED = True
except ImportError:
    _corekernels = None
    _HAVE_COMPILED = False


def _select():
    choice = os.environ.get("VEKUA_BACKEND", "auto").lower()
    if choice == "pure":
        return _kernels_np, "pure"
    if choice == "compiled":
        if not _HAVE_COMPILED:
            raise ImportError(
                "VEKUA_BACKEND=compiled but vekua._corekernels is not built"
            )
        return _corekernels, "compiled"
    if choice != "auto":
        raise ValueError(f"unknown VEKUA_BACKEND={choice!r}")
    if _HAVE_COMPILED:
        return _corekernels, "compiled"
    return _kernels_np, "pure"


_impl, _name = _select()


def backend_name() -> str:
    return _name


def have_compiled() -> bool:
    return _HAVE_COMPILED


def get_backend(name: str):
    """Explicit backend module, for parity tests and benchmarks."""
    if name == "pure":
        return _kernels_np
    if name == "compiled":
        if not _HAVE_COMPILED:
            raise ImportError("compiled backend not available")
        return _corekernels
    raise ValueError(name)


def _stack_in(fields: np.ndarray) -> np.ndarray:
    """(M, N, 4) field stack -> (N, 4, M) contiguous kernel layout."""
    return np.ascontiguousarray(np.transpose(fields, (1, 2, 0)))


def _stack_out(raw: np.ndarray) -> np.ndarray:
    """(T, 4, M) kernel layout -> (M, T, 4)."""
    return np.ascontiguousarray(np.transpose(raw, (2, 0, 1)))


def teo_stack(tpts, spts, w, fields, impl=None) -> np.ndarray:
    """Theodorescu sum of a stack of fields; fields (M,N,4) -> (M,T,4)."""
    mod = impl or _impl
    return _stack_out(
        mod.teo_apply(
            np.ascontiguousarray(tpts, float),
            np.ascontiguousarray(spts, float),
            np.ascontiguousarray(w, float),
            _stack_in(np.asarray(fields, complex)),
        )
    )


def newton_stack(tpts, spts, w, fields, impl=None) -> np.ndarray:
    mod = impl or _impl
    return _stack_out(
        mod.newton_apply(
            np.ascontiguousarray(tpts, float),
            np.ascontiguousarray(spts, float),
            np.ascontiguousarray(w, float),
            _stack_in(np.asarray(fields, complex)),
        )
    )


def helm_stack(tpts, spts, w, fields, alpha, c, deriv=False, impl=None) -> np.ndarray:
    mod = impl or _impl
    return _stack_out(
        mod.helm_apply(
            np.ascontiguousarray(tpts, float),
            np.ascontiguousarray(spts, float),
            np.ascontiguousarray(w, float),
            _stack_in(np.asarray(fields, complex)),
            complex(alpha),
            complex(c),
            bool(deriv),
        )
    )
