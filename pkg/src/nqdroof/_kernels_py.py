"""NumPy fallback for the compiled kernels.

Used when the Cython extension is not built (or when forced through the
``NQDROOF_PURE_PYTHON`` environment variable).  Targets are processed in
chunks to bound the size of the broadcast temporaries.
"""

import numpy as np

_CHUNK = 2048


def _as_c128(a):
    return np.ascontiguousarray(a, dtype=np.complex128)


def cauchy_sum(nodes, coeffs, targets):
    """sum_j coeffs[j] / (nodes[j] - targets[p]) for every target p."""
    nodes = _as_c128(nodes)
    coeffs = _as_c128(coeffs)
    targets = _as_c128(targets)
    out = np.empty(targets.shape[0], dtype=np.complex128)
    for lo in range(0, targets.shape[0], _CHUNK):
        t = targets[lo:lo + _CHUNK]
        out[lo:lo + _CHUNK] = (coeffs[None, :] / (nodes[None, :] - t[:, None])).sum(axis=1)
    return out


def segment_log_sum(nodes, coeffs, seg_a, seg_b):
    """sum_j coeffs[j] * Log((nodes[j]-a_p)/(nodes[j]-b_p)) per segment p."""
    nodes = _as_c128(nodes)
    coeffs = _as_c128(coeffs)
    seg_a = _as_c128(seg_a)
    seg_b = _as_c128(seg_b)
    out = np.empty(seg_a.shape[0], dtype=np.complex128)
    for lo in range(0, seg_a.shape[0], _CHUNK):
        a = seg_a[lo:lo + _CHUNK, None]
        b = seg_b[lo:lo + _CHUNK, None]
        ratio = (nodes[None, :] - a) / (nodes[None, :] - b)
        out[lo:lo + _CHUNK] = (coeffs[None, :] * np.log(ratio)).sum(axis=1)
    return out


def nearest_node(nodes, targets):
    """Per-target distance to the closest node and its index."""
    nodes = _as_c128(nodes)
    targets = _as_c128(targets)
    dist = np.empty(targets.shape[0], dtype=np.float64)
    idx = np.empty(targets.shape[0], dtype=np.int64)
    for lo in range(0, targets.shape[0], _CHUNK):
        t = targets[lo:lo + _CHUNK]
        d = np.abs(nodes[None, :] - t[:, None])
        j = d.argmin(axis=1)
        idx[lo:lo + _CHUNK] = j
        dist[lo:lo + _CHUNK] = d[np.arange(t.shape[0]), j]
    return dist, idx
