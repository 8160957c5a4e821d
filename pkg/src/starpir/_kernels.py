"""Hot enumeration kernels: numba-jitted with a pure-numpy fallback.

The only operation whose cost grows with the codebook size is exhaustive
codeword enumeration (minimum distances, weight distributions).  The
kernel walks all order**k messages of a k-row generator with an odometer
that re-expands only the suffix of partial sums that changed, so the
work is O(order**k * n) table lookups.

Backend selection: the STARPIR_BACKEND environment variable may be set
to "numba", "numpy", or "auto" (default).  "auto" uses numba when it
imports, otherwise falls back to numpy.  Both backends return identical
histograms; ``benchmarks/backend_bench.py`` compares their speed.
"""

from __future__ import annotations

import os

import numpy as np

__all__ = ["BACKEND", "weight_histogram"]

_CHUNK = 1 << 15


def _weight_histogram_numpy(gen: np.ndarray, add_t: np.ndarray, mul_t: np.ndarray,
                            order: int) -> np.ndarray:
    k, n = gen.shape
    total = order**k
    hist = np.zeros(n + 1, dtype=np.int64)
    for start in range(0, total, _CHUNK):
        idx = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        words = np.zeros((idx.size, n), dtype=np.int16)
        rem = idx
        for i in range(k):
            digit = (rem % order).astype(np.int16)
            rem = rem // order
            words = add_t[words, mul_t[digit[:, None], gen[i][None, :]]]
        weights = np.count_nonzero(words, axis=1)
        hist += np.bincount(weights, minlength=n + 1)
    return hist


def _weight_histogram_scalar(gen, add_t, mul_t, order):  # pragma: no cover - jitted
    k, n = gen.shape
    hist = np.zeros(n + 1, dtype=np.int64)
    digits = np.zeros(k, dtype=np.int64)
    partial = np.zeros((k + 1, n), dtype=np.int16)
    hist[0] += 1  # zero message
    total = order**k
    for _ in range(total - 1):
        lvl = k - 1
        while digits[lvl] == order - 1:
            digits[lvl] = 0
            lvl -= 1
        digits[lvl] += 1
        for i in range(lvl, k):
            d = digits[i]
            for j in range(n):
                partial[i + 1, j] = add_t[partial[i, j], mul_t[d, gen[i, j]]]
        w = 0
        for j in range(n):
            if partial[k, j] != 0:
                w += 1
        hist[w] += 1
    return hist


def _resolve_backend() -> tuple[str, object]:
    requested = os.environ.get("STARPIR_BACKEND", "auto").lower()
    if requested not in ("auto", "numba", "numpy"):
        raise ValueError(f"STARPIR_BACKEND must be auto|numba|numpy, got {requested!r}")
    if requested == "numpy":
        return "numpy", _weight_histogram_numpy
    try:
        from numba import njit
    except ImportError:
        if requested == "numba":
            raise
        return "numpy", _weight_histogram_numpy
    return "numba", njit(cache=True)(_weight_histogram_scalar)


BACKEND, _histogram_impl = _resolve_backend()


def weight_histogram(gen: np.ndarray, add_t: np.ndarray, mul_t: np.ndarray,
                     order: int) -> np.ndarray:
    """Hamming-weight histogram over all order**k messages of ``gen``.

    Entry w counts messages whose codeword has weight w; the zero
    message contributes to entry 0.
    """
    gen = np.ascontiguousarray(gen, dtype=np.int16)
    if gen.shape[0] == 0:
        hist = np.zeros(gen.shape[1] + 1, dtype=np.int64)
        hist[0] = 1
        return hist
    return _histogram_impl(gen, add_t, mul_t, order)
