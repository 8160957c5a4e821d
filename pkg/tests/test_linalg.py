from itertools import product

import numpy as np
import pytest

from oracles import span_rank
from starpir import linalg
from starpir.gf import Field
from starpir.linalg import InconsistentSystemError, LinAlgError, RankDeficientError


def rand_matrix(rng, field, rows, cols):
    return rng.integers(0, field.order, size=(rows, cols), dtype=np.int64).astype(np.int16)


def test_rref_identity(gf4):
    eye = linalg.identity(3)
    r, pivots = linalg.rref(gf4, eye)
    assert np.array_equal(r, eye)
    assert pivots == (0, 1, 2)


def test_rref_duplicate_rows_gf2():
    f2 = Field(2, 1)
    r, pivots = linalg.rref(f2, [[1, 1], [1, 1]])
    assert np.array_equal(r, [[1, 1], [0, 0]])
    assert pivots == (0,)


def test_rref_idempotent(gf9):
    rng = np.random.default_rng(1)
    for _ in range(20):
        m = rand_matrix(rng, gf9, 4, 6)
        r1, p1 = linalg.rref(gf9, m)
        r2, p2 = linalg.rref(gf9, r1)
        assert np.array_equal(r1, r2) and p1 == p2


def test_rank_matches_span_enumeration(gf4, gf9):
    rng = np.random.default_rng(2)
    for f in (gf4, gf9):
        for _ in range(8):
            m = rand_matrix(rng, f, 3, 4)
            assert linalg.rank(f, m) == span_rank(m.tolist(), f.q, f.m, f.modulus)


def test_rank_equals_rank_of_transpose_exhaustive_binary():
    f2 = Field(2, 1)
    for bits in product((0, 1), repeat=12):
        m = np.array(bits, dtype=np.int16).reshape(3, 4)
        assert linalg.rank(f2, m) == linalg.rank(f2, m.T)


def test_rref_canonicalizes_equal_row_spaces(gf8):
    rng = np.random.default_rng(3)
    for _ in range(20):
        m = rand_matrix(rng, gf8, 3, 5)
        # random invertible row mixing preserves the row space
        while True:
            t = rand_matrix(rng, gf8, 3, 3)
            if linalg.rank(gf8, t) == 3:
                break
        mixed = linalg.mat_mul(gf8, t, m)
        assert np.array_equal(linalg.rref(gf8, m)[0], linalg.rref(gf8, mixed)[0])


def test_null_space_of_all_ones_parity():
    f2 = Field(2, 1)
    basis = linalg.null_space_basis(f2, [[1, 1, 1, 1]])
    assert basis.shape == (3, 4)
    assert all(int(row.sum()) % 2 == 0 for row in basis)
    assert linalg.rank(f2, basis) == 3


def test_null_space_orthogonal_to_row_space(gf4):
    rng = np.random.default_rng(4)
    for _ in range(10):
        g = rand_matrix(rng, gf4, 2, 5)
        ns = linalg.null_space_basis(gf4, g)
        assert linalg.rank(gf4, g) + ns.shape[0] == 5
        prod = linalg.mat_mul(gf4, g, ns.T)
        assert not prod.any()


def test_null_space_of_empty_matrix_is_full_space(gf4):
    ns = linalg.null_space_basis(gf4, np.zeros((0, 4), dtype=np.int16))
    assert np.array_equal(ns, linalg.identity(4))


def test_solve_identity(gf9):
    b = np.array([5, 0, 7], dtype=np.int16)
    assert np.array_equal(linalg.solve(gf9, linalg.identity(3), b), b)


def test_solve_round_trips(gf4, gf9):
    rng = np.random.default_rng(5)
    for f in (gf4, gf9):
        done = 0
        while done < 15:
            a = rand_matrix(rng, f, 5, 3)
            if linalg.rank(f, a) < 3:
                continue
            x = rng.integers(0, f.order, size=3, dtype=np.int64).astype(np.int16)
            b = linalg.mat_vec(f, a, x)
            assert np.array_equal(linalg.solve(f, a, b), x)
            done += 1


def test_solve_inconsistent(gf4):
    a = np.array([[1, 0], [1, 0], [0, 1]], dtype=np.int16)
    b = np.array([1, 2, 0], dtype=np.int16)
    with pytest.raises(InconsistentSystemError):
        linalg.solve(gf4, a, b)


def test_solve_rank_deficient(gf4):
    a = np.array([[1, 1], [1, 1]], dtype=np.int16)
    b = np.array([1, 1], dtype=np.int16)
    with pytest.raises(RankDeficientError):
        linalg.solve(gf4, a, b)


def test_solve_shape_validation(gf4):
    with pytest.raises(LinAlgError):
        linalg.solve(gf4, linalg.identity(2), np.array([1, 0, 0], dtype=np.int16))
    with pytest.raises(LinAlgError):
        linalg.mat_mul(gf4, linalg.identity(2), linalg.identity(3))


def test_mat_mul_matches_scalar_loop(gf8):
    rng = np.random.default_rng(6)
    a = rand_matrix(rng, gf8, 3, 4)
    b = rand_matrix(rng, gf8, 4, 2)
    got = linalg.mat_mul(gf8, a, b)
    for i in range(3):
        for j in range(2):
            acc = 0
            for t in range(4):
                acc = gf8.add(acc, gf8.mul(int(a[i, t]), int(b[t, j])))
            assert got[i, j] == acc
