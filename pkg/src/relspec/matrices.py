"""Matrix containers, products, inner products, and reproducible randomness.

Dense matrices are float64 C-contiguous ndarrays; sparse matrices are
canonical CSC (duplicates summed, explicit zeros dropped, row indices sorted
within each column).  All routines accept either representation where it
makes sense.  `RngStream` wraps a counter-based generator so that every
consumer of randomness is bitwise reproducible from (seed, substream).
"""
from __future__ import annotations

import numpy as np
from scipy import sparse

__all__ = [
    "RngStream",
    "as_dense",
    "as_sparse",
    "frobenius_inner",
    "matvec",
    "matvec_transpose",
    "sample_unit_sphere",
]


def as_dense(M) -> np.ndarray:
    """Validate and return ``M`` as a 2-D float64 C-contiguous array."""
    if sparse.issparse(M):
        M = M.toarray()
    A = np.ascontiguousarray(M, dtype=np.float64)
    if A.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got ndim={A.ndim}")
    if not np.isfinite(A).all():
        raise ValueError("matrix entries must be finite")
    return A


def as_sparse(M) -> sparse.csc_array:
    """Validate and return ``M`` in canonical CSC form.

    Canonical means: duplicate entries summed, explicit zeros removed, and
    row indices strictly increasing within each column.
    """
    if sparse.issparse(M):
        S = sparse.csc_array(M, dtype=np.float64)
    else:
        A = np.asarray(M, dtype=np.float64)
        if A.ndim != 2:
            raise ValueError(f"expected a 2-D matrix, got ndim={A.ndim}")
        S = sparse.csc_array(A)
    S.sum_duplicates()
    S.eliminate_zeros()
    S.sort_indices()
    if not np.isfinite(S.data).all():
        raise ValueError("matrix entries must be finite")
    return S


def _check_vector(v, length: int, side: str) -> np.ndarray:
    x = np.asarray(v, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] != length:
        raise ValueError(f"{side} vector has shape {x.shape}, expected ({length},)")
    return x


def matvec(M, v) -> np.ndarray:
    """Return ``M @ v`` for a dense or sparse matrix and a 1-D vector."""
    x = _check_vector(v, M.shape[1], "input")
    return np.asarray(M @ x, dtype=np.float64)


def matvec_transpose(M, w) -> np.ndarray:
    """Return ``M.T @ w`` for a dense or sparse matrix and a 1-D vector."""
    x = _check_vector(w, M.shape[0], "input")
    return np.asarray(M.T @ x, dtype=np.float64)


def frobenius_inner(A, B) -> float:
    """Entrywise inner product ``sum_ij A_ij B_ij`` for dense/sparse operands."""
    if A.shape != B.shape:
        raise ValueError(f"shape mismatch: {A.shape} vs {B.shape}")
    if sparse.issparse(A):
        return float(A.multiply(B).sum())
    if sparse.issparse(B):
        return float(B.multiply(A).sum())
    return float(np.tensordot(np.asarray(A, dtype=np.float64),
                              np.asarray(B, dtype=np.float64), axes=2))


class RngStream:
    """Counter-based random stream addressed by ``(seed, substream)``.

    Two streams with the same address produce bitwise-identical draws in the
    same call order; different substreams of one seed are statistically
    independent.  The conventional substream assignments used by the
    experiment harness are exposed as class attributes.
    """

    DATA = 0
    ORACLE = 1
    EVAL = 2

    def __init__(self, seed: int, substream: int = 0):
        self.seed = int(seed)
        self.substream = int(substream)
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.substream,))
        self.generator = np.random.Generator(np.random.Philox(ss))

    def spawn(self, substream: int) -> "RngStream":
        """Return the stream at the same seed and the given substream."""
        return RngStream(self.seed, substream)

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"RngStream(seed={self.seed}, substream={self.substream})"


def sample_unit_sphere(rng: RngStream, n: int) -> np.ndarray:
    """Draw a uniform point on the unit sphere in ``R^n``.

    Normalized Gaussian vector; the zero draw is rejected (probability zero,
    guarded for robustness).  For ``n = 1`` the result is exactly ±1.
    """
    if n < 1:
        raise ValueError(f"dimension must be positive, got {n}")
    while True:
        g = rng.generator.standard_normal(n)
        norm = float(np.linalg.norm(g))
        if norm > 0.0 and np.isfinite(norm):
            return g / norm
