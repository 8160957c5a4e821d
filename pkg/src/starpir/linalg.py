"""Exact dense linear algebra over a Field.

Matrices are numpy int16 arrays of element codes; the Field that
interprets the entries is passed alongside.  Gaussian elimination uses
first-nonzero pivoting, so every result is deterministic.  No floating
point anywhere.

Functions accept an optional ``counter`` (any object exposing
``tally_ext_add(n, m)`` / ``tally_ext_mul(n, m)``) used to report the
field operations a call performs.
"""

from __future__ import annotations

import numpy as np

from .gf import Field

__all__ = [
    "InconsistentSystemError",
    "LinAlgError",
    "RankDeficientError",
    "identity",
    "mat_mul",
    "mat_vec",
    "null_space_basis",
    "rank",
    "rref",
    "solve",
]


class LinAlgError(ValueError):
    pass


class InconsistentSystemError(LinAlgError):
    pass


class RankDeficientError(LinAlgError):
    pass


def as_matrix(entries) -> np.ndarray:
    mat = np.asarray(entries, dtype=np.int16)
    if mat.ndim != 2:
        raise LinAlgError(f"expected a 2-d matrix, got shape {mat.shape}")
    return mat


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.int16)


def rref(field: Field, mat, counter=None) -> tuple[np.ndarray, tuple[int, ...]]:
    """Reduced row-echelon form and pivot columns.  Idempotent."""
    r = as_matrix(mat).copy()
    rows, cols = r.shape
    add_t, mul_t, neg_t, inv_t = field.add_table, field.mul_table, field.neg_table, field.inv_table
    pivots = []
    lead = 0
    for c in range(cols):
        if lead == rows:
            break
        nz = np.flatnonzero(r[lead:, c])
        if nz.size == 0:
            continue
        p = lead + int(nz[0])
        if p != lead:
            r[[lead, p]] = r[[p, lead]]
        pivot = r[lead, c]
        if pivot != 1:
            r[lead] = mul_t[inv_t[pivot], r[lead]]
            if counter is not None:
                counter.tally_ext_mul(cols, field.m)
        targets = np.flatnonzero(r[:, c])
        targets = targets[targets != lead]
        if targets.size:
            factors = neg_t[r[targets, c]]
            r[targets] = add_t[r[targets], mul_t[factors[:, None], r[lead][None, :]]]
            if counter is not None:
                counter.tally_ext_mul(int(targets.size) * cols, field.m)
                counter.tally_ext_add(int(targets.size) * cols, field.m)
        pivots.append(c)
        lead += 1
    return r, tuple(pivots)


def rank(field: Field, mat) -> int:
    return len(rref(field, mat)[1])


def null_space_basis(field: Field, mat) -> np.ndarray:
    """Rows spanning {x : M x^T = 0}; rank(M) + rows = cols."""
    mat = as_matrix(mat)
    cols = mat.shape[1]
    r, pivots = rref(field, mat)
    free = [c for c in range(cols) if c not in set(pivots)]
    basis = np.zeros((len(free), cols), dtype=np.int16)
    neg_t = field.neg_table
    for idx, f in enumerate(free):
        basis[idx, f] = 1
        for i, p in enumerate(pivots):
            basis[idx, p] = neg_t[r[i, f]]
    return basis


def mat_mul(field: Field, a, b, counter=None) -> np.ndarray:
    a, b = as_matrix(a), as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise LinAlgError(f"shape mismatch {a.shape} x {b.shape}")
    add_t, mul_t = field.add_table, field.mul_table
    out = np.zeros((a.shape[0], b.shape[1]), dtype=np.int16)
    for t in range(a.shape[1]):
        out = add_t[out, mul_t[a[:, t][:, None], b[t, :][None, :]]]
    if counter is not None and a.shape[1]:
        n_out = a.shape[0] * b.shape[1]
        counter.tally_ext_mul(n_out * a.shape[1], field.m)
        counter.tally_ext_add(n_out * (a.shape[1] - 1), field.m)
    return out


def mat_vec(field: Field, a, v, counter=None) -> np.ndarray:
    v = np.asarray(v, dtype=np.int16)
    return mat_mul(field, a, v[:, None], counter)[:, 0]


def solve(field: Field, a, b, counter=None) -> np.ndarray:
    """Solve A x = b for A with full column rank and consistent b."""
    a = as_matrix(a)
    b = np.asarray(b, dtype=np.int16)
    if b.ndim != 1 or b.shape[0] != a.shape[0]:
        raise LinAlgError(f"rhs shape {b.shape} does not match {a.shape}")
    ncols = a.shape[1]
    aug = np.hstack([a, b[:, None]])
    r, pivots = rref(field, aug, counter)
    if ncols in pivots:
        raise InconsistentSystemError("system has no solution")
    if len(pivots) < ncols:
        raise RankDeficientError(
            f"coefficient matrix has rank {len(pivots)} < {ncols} columns"
        )
    return r[:ncols, ncols].copy()
