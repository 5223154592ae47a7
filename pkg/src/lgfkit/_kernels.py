"""Hot loops with a numba implementation and a pure numpy fallback.

Set ``LGFKIT_DISABLE_NUMBA=1`` to force the numpy versions.  Both paths
perform the same floating point operations in the same order, so results
agree bit for bit.
"""
from __future__ import annotations

import os

import numpy as np

__all__ = ["USING_NUMBA", "stencil_apply", "direct_convolve3", "expand_symmetric",
           "stencil_apply_numpy", "direct_convolve3_numpy", "expand_symmetric_numpy"]

_disabled = os.environ.get("LGFKIT_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes")

try:
    if _disabled:
        raise ImportError
    from numba import njit
    USING_NUMBA = True
except ImportError:  # pragma: no cover - depends on the environment
    USING_NUMBA = False


# ---------------------------------------------------------------------------
# numpy versions
# ---------------------------------------------------------------------------

def stencil_apply_numpy(padded, offsets, weights, origin, shape):
    """``out[p] = sum_e weights[e] * padded[p + origin + offsets[e]]``."""
    out = np.zeros(shape)
    for e in range(offsets.shape[0]):
        s = tuple(slice(o + d, o + d + n) for o, d, n in zip(origin, offsets[e], shape))
        out += weights[e] * padded[s]
    return out


def direct_convolve3_numpy(f, kernel):
    """``u[i] = sum_j kernel[i - j + N - 1] f[j]`` on an ``N1 x N2 x N3`` grid."""
    n1, n2, n3 = f.shape
    out = np.zeros(f.shape)
    for a in range(n1):
        for b in range(n2):
            for c in range(n3):
                v = f[a, b, c]
                if v != 0.0:
                    out += v * kernel[n1 - 1 - a:2 * n1 - 1 - a,
                                      n2 - 1 - b:2 * n2 - 1 - b,
                                      n3 - 1 - c:2 * n3 - 1 - c]
    return out


def _rank_array(extent, dim):
    idx = np.full((extent + 1,) * dim, -1, dtype=np.int64)
    count = 0
    if dim == 3:
        for a in range(extent + 1):
            for b in range(a, extent + 1):
                for c in range(b, extent + 1):
                    idx[a, b, c] = count
                    count += 1
    else:
        for a in range(extent + 1):
            for b in range(a, extent + 1):
                idx[a, b] = count
                count += 1
    return idx


def expand_symmetric_numpy(values, extent, dim):
    """Dense ``[0, extent]^dim`` array from values in sorted-tuple order."""
    rank = _rank_array(extent, dim)
    grids = np.meshgrid(*([np.arange(extent + 1)] * dim), indexing="ij")
    key = np.sort(np.stack(grids, axis=-1), axis=-1)
    return np.asarray(values)[rank[tuple(key[..., i] for i in range(dim))]]


# ---------------------------------------------------------------------------
# numba versions
# ---------------------------------------------------------------------------

if USING_NUMBA:

    @njit(cache=True)
    def _stencil_apply_nb(padded, offsets, weights, origin, shape):
        out = np.zeros((shape[0], shape[1], shape[2]))
        for e in range(offsets.shape[0]):
            w = weights[e]
            d0 = origin[0] + offsets[e, 0]
            d1 = origin[1] + offsets[e, 1]
            d2 = origin[2] + offsets[e, 2]
            for i in range(shape[0]):
                for j in range(shape[1]):
                    for k in range(shape[2]):
                        out[i, j, k] += w * padded[i + d0, j + d1, k + d2]
        return out

    @njit(cache=True)
    def _direct_convolve3_nb(f, kernel):
        n1, n2, n3 = f.shape
        out = np.zeros((n1, n2, n3))
        for a in range(n1):
            for b in range(n2):
                for c in range(n3):
                    v = f[a, b, c]
                    if v != 0.0:
                        for i in range(n1):
                            for j in range(n2):
                                for k in range(n3):
                                    out[i, j, k] += v * kernel[i - a + n1 - 1,
                                                               j - b + n2 - 1,
                                                               k - c + n3 - 1]
        return out

    @njit(cache=True)
    def _expand3_nb(values, rank, extent):
        n = extent + 1
        out = np.empty((n, n, n))
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    a, b, c = i, j, k
                    if a > b:
                        a, b = b, a
                    if b > c:
                        b, c = c, b
                    if a > b:
                        a, b = b, a
                    out[i, j, k] = values[rank[a, b, c]]
        return out


def stencil_apply(padded, offsets, weights, origin, shape):
    offsets = np.ascontiguousarray(offsets, dtype=np.int64)
    weights = np.ascontiguousarray(weights, dtype=float)
    padded = np.ascontiguousarray(padded, dtype=float)
    if USING_NUMBA and padded.ndim == 3:
        return _stencil_apply_nb(padded, offsets, weights,
                                 np.asarray(origin, dtype=np.int64),
                                 np.asarray(shape, dtype=np.int64))
    return stencil_apply_numpy(padded, offsets, weights, tuple(origin), tuple(shape))


def direct_convolve3(f, kernel):
    f = np.ascontiguousarray(f, dtype=float)
    kernel = np.ascontiguousarray(kernel, dtype=float)
    if USING_NUMBA:
        return _direct_convolve3_nb(f, kernel)
    return direct_convolve3_numpy(f, kernel)


def expand_symmetric(values, extent, dim):
    values = np.ascontiguousarray(values, dtype=float)
    if USING_NUMBA and dim == 3:
        return _expand3_nb(values, _rank_array(extent, 3), extent)
    return expand_symmetric_numpy(values, extent, dim)
