"""Tests for matrix containers, products, and reproducible sphere sampling."""
from __future__ import annotations

import numpy as np
import pytest
from scipy import sparse

from relspec.matrices import (
    RngStream,
    as_dense,
    as_sparse,
    frobenius_inner,
    matvec,
    matvec_transpose,
    sample_unit_sphere,
)


# ---------------------------------------------------------------- containers

def test_as_dense_validates():
    M = as_dense([[1.0, 2.0], [3.0, 4.0]])
    assert M.dtype == np.float64 and M.flags["C_CONTIGUOUS"]
    with pytest.raises(ValueError):
        as_dense([[np.inf, 0.0]])
    with pytest.raises(ValueError):
        as_dense([1.0, 2.0])  # not 2-D


def test_as_sparse_canonicalizes():
    # duplicate and zero entries must be merged/dropped, rows sorted per column
    coo = sparse.coo_array(
        (np.array([1.0, 2.0, 0.0, 3.0]), (np.array([1, 1, 0, 0]), np.array([0, 0, 1, 0]))),
        shape=(2, 2),
    )
    M = as_sparse(coo)
    assert M.format == "csc"
    assert M.nnz == 2  # (1,0)=3 merged, (0,1)=0 dropped, (0,0)=3
    dense = M.toarray()
    assert dense[1, 0] == 3.0 and dense[0, 0] == 3.0 and dense[0, 1] == 0.0
    for j in range(M.shape[1]):
        rows = M.indices[M.indptr[j] : M.indptr[j + 1]]
        assert np.all(np.diff(rows) > 0)  # strictly increasing
    with pytest.raises(ValueError):
        as_sparse(np.array([[np.nan, 0.0], [0.0, 0.0]]))


# ------------------------------------------------------------------- matvec

def test_matvec_identity():
    assert np.array_equal(matvec(np.eye(3), np.array([1.0, 2.0, 3.0])), [1.0, 2.0, 3.0])


def test_matvec_zero():
    assert np.array_equal(matvec(np.zeros((2, 3)), np.ones(3)), np.zeros(2))


def test_matvec_sparse_single_entry():
    M = as_sparse(np.array([[0.0, 5.0], [0.0, 0.0]]))
    assert np.array_equal(matvec(M, np.array([1.0, 2.0])), [10.0, 0.0])


def test_matvec_dimension_mismatch():
    with pytest.raises(ValueError):
        matvec(np.eye(3), np.ones(2))
    with pytest.raises(ValueError):
        matvec_transpose(np.eye(3), np.ones(4))


def test_matvec_transpose_cases():
    assert np.array_equal(matvec_transpose(np.eye(3), np.array([1.0, 2.0, 3.0])), [1.0, 2.0, 3.0])
    M = np.ones((2, 3))
    assert np.array_equal(matvec_transpose(M, np.array([1.0, 1.0])), [2.0, 2.0, 2.0])
    assert np.array_equal(matvec_transpose(np.zeros((2, 3)), np.ones(2)), np.zeros(3))


def test_sparse_matvec_matches_dense():
    rng = np.random.default_rng(0)
    for _ in range(20):
        n, m = rng.integers(1, 51, size=2)
        D = rng.standard_normal((n, m)) * (rng.random((n, m)) < 0.3)
        S = as_sparse(D)
        v = rng.standard_normal(m)
        w = rng.standard_normal(n)
        ref, got = matvec(D, v), matvec(S, v)
        assert np.allclose(got, ref, rtol=1e-12, atol=1e-12 * (1 + np.abs(ref).max()))
        ref_t, got_t = matvec_transpose(D, w), matvec_transpose(S, w)
        assert np.allclose(got_t, ref_t, rtol=1e-12, atol=1e-12 * (1 + np.abs(ref_t).max()))


# ---------------------------------------------------------- frobenius_inner

def test_frobenius_inner_hand_values():
    assert frobenius_inner(np.eye(2), np.eye(2)) == 2.0
    assert frobenius_inner(np.ones((2, 2)), np.zeros((2, 2))) == 0.0
    A = np.array([[1.0, 2.0], [3.0, 4.0]])
    B = np.array([[5.0, 6.0], [7.0, 8.0]])
    assert frobenius_inner(A, B) == 70.0


def test_frobenius_inner_shape_check():
    with pytest.raises(ValueError):
        frobenius_inner(np.eye(2), np.eye(3))


def test_frobenius_inner_is_squared_norm():
    rng = np.random.default_rng(1)
    for _ in range(10):
        M = rng.standard_normal((4, 7))
        ip = frobenius_inner(M, M)
        assert ip >= 0.0
        assert np.isclose(ip, np.linalg.norm(M) ** 2, rtol=1e-12)


def test_frobenius_inner_sparse_paths_match_dense():
    rng = np.random.default_rng(2)
    for _ in range(20):
        n, m = rng.integers(1, 20, size=2)
        D1 = rng.standard_normal((n, m)) * (rng.random((n, m)) < 0.4)
        D2 = rng.standard_normal((n, m)) * (rng.random((n, m)) < 0.4)
        ref = frobenius_inner(D1, D2)
        tol = 1e-12 * (1 + abs(ref))
        assert abs(frobenius_inner(as_sparse(D1), as_sparse(D2)) - ref) <= tol
        assert abs(frobenius_inner(as_sparse(D1), D2) - ref) <= tol
        assert abs(frobenius_inner(D1, as_sparse(D2)) - ref) <= tol
        # sparse against a rank-one matrix (the gradient samples have this shape)
        u, v = rng.standard_normal(n), rng.standard_normal(m)
        ref1 = frobenius_inner(D1, np.outer(u, v))
        assert abs(frobenius_inner(as_sparse(D1), np.outer(u, v)) - ref1) <= 1e-12 * (1 + abs(ref1))


# ----------------------------------------------------------------- sampling

def test_sample_unit_sphere_norm():
    rng = RngStream(123)
    for n in (1, 2, 3, 10, 200):
        u = sample_unit_sphere(rng, n)
        assert u.shape == (n,)
        assert abs(np.linalg.norm(u) - 1.0) <= 1e-12


def test_sample_unit_sphere_n1_is_sign():
    rng = RngStream(7)
    vals = {float(sample_unit_sphere(rng, 1)[0]) for _ in range(64)}
    assert vals == {-1.0, 1.0}


def test_sample_unit_sphere_rejects_n0():
    with pytest.raises(ValueError):
        sample_unit_sphere(RngStream(0), 0)


def test_sample_unit_sphere_distinct_calls():
    rng = RngStream(9)
    a, b = sample_unit_sphere(rng, 4), sample_unit_sphere(rng, 4)
    assert not np.array_equal(a, b)


def test_sample_unit_sphere_coordinate_means():
    # symmetry: each coordinate has mean 0; CLT bound 4/sqrt(M) is ~7 sigma
    rng = RngStream(42)
    M = 10**5
    acc = np.zeros(3)
    for _ in range(M):
        acc += sample_unit_sphere(rng, 3)
    assert np.all(np.abs(acc / M) <= 4.0 / np.sqrt(M))


def test_rngstream_determinism_bitwise():
    a = [sample_unit_sphere(RngStream(2024), n) for n in (3, 5, 3)]
    b = [sample_unit_sphere(RngStream(2024), n) for n in (3, 5, 3)]
    for x, y in zip(a, b):
        assert np.array_equal(x, y)  # bitwise


def test_rngstream_substreams_differ():
    u0 = sample_unit_sphere(RngStream(5, 0), 8)
    u1 = sample_unit_sphere(RngStream(5, 1), 8)
    assert not np.array_equal(u0, u1)
    assert np.array_equal(u1, sample_unit_sphere(RngStream(5).spawn(1), 8))
