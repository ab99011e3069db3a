"""Randomized value and gradient oracles for spectral power means.

For a PSD operator X and a uniform unit vector u, the directional value
``<X^p u, u>^(1/p)`` (p odd) is computed by a power chain that accumulates
norm factors as sums of logarithms, so extreme eigenvalue scales neither
overflow nor underflow.  On top of the chain sit cheap low-rank gradient
samples:

* ``sample_gradient``    — rank-one sample for the symmetric power mean,
* ``gram_gradient_sample`` — rank-one rectangular sample for Y via Y Y^T,
* ``square_gradient_sample`` — symmetric rank-two sample for S via S^2,
* ``power_iteration_sample`` — heuristic rectangular sample that replaces the
  power-mean weight with a plain power-iteration direction.

Matrix arguments may be dense arrays, sparse matrices, a single callable
``v -> X v`` (symmetric case), or a pair ``(apply, apply_transpose)`` for
rectangular factors.  Gram and square chains touch their factor exactly
``p`` times per sample; the power-iteration sample uses ``2q + 1`` products.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import KernelHit
from .matrices import RngStream, sample_unit_sphere

__all__ = [
    "KERNEL_EPS",
    "PowerChainResult",
    "RankOneRect",
    "RankOneSym",
    "RankTwoSym",
    "approximation_ratio",
    "estimate_power_mean",
    "gram_gradient_sample",
    "power_chain",
    "power_iteration_sample",
    "sample_gradient",
    "sample_value",
    "square_gradient_sample",
]

# Draws whose chain norm^2 or Rayleigh quotient falls at or below this are
# treated as kernel hits: a probability-zero event for operators with a
# positive top eigenvalue, answered with a zero sample instead of resampling.
KERNEL_EPS = 1e-300
_KERNEL_NORM = math.sqrt(KERNEL_EPS)  # threshold on the un-squared norm


# ----------------------------------------------------------------- sample types

@dataclass
class RankOneSym:
    """``scale * direction direction^T`` with ``scale >= 0``."""

    scale: float
    direction: np.ndarray

    def to_dense(self) -> np.ndarray:
        return self.scale * np.outer(self.direction, self.direction)


@dataclass
class RankOneRect:
    """``left right^T`` for possibly rectangular shapes."""

    left: np.ndarray
    right: np.ndarray

    def to_dense(self) -> np.ndarray:
        return np.outer(self.left, self.right)


@dataclass
class RankTwoSym:
    """``v w^T + w v^T`` — symmetric, rank at most two."""

    v: np.ndarray
    w: np.ndarray

    def to_dense(self) -> np.ndarray:
        return np.outer(self.v, self.w) + np.outer(self.w, self.v)


@dataclass
class PowerChainResult:
    """State after k power-method steps plus one closing application.

    ``y`` is the unit iterate, ``log_norm_accum`` the accumulated
    ``sum ln||X y_i||^2``, ``rayleigh`` the quotient ``<X y, y>``, and
    ``value`` the degree-(2k+1) directional power mean assembled from the
    logarithmic pieces.
    """

    y: np.ndarray
    log_norm_accum: float
    rayleigh: float
    value: float


# -------------------------------------------------------------------- helpers

def _check_degree(p) -> int:
    """Validate an odd positive degree and return k = (p - 1) / 2."""
    if not isinstance(p, (int, np.integer)):
        raise ValueError(f"degree must be an integer, got {type(p).__name__}")
    p = int(p)
    if p < 1 or p % 2 == 0:
        raise ValueError(f"degree must be odd and positive, got {p}")
    return (p - 1) // 2


def _check_unit(u) -> np.ndarray:
    x = np.asarray(u, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError(f"expected a vector, got shape {x.shape}")
    if abs(float(np.linalg.norm(x)) - 1.0) > 1e-8:
        raise ValueError("direction must be a unit vector")
    return x


def _as_apply(X):
    if callable(X):
        return X
    return lambda v: X @ v


def _pair_ops(Y):
    """Return (apply, apply_transpose) for a matrix or a callable pair."""
    if isinstance(Y, tuple):
        apply, apply_t = Y
        return apply, apply_t
    YT = Y.T
    return (lambda v: Y @ v), (lambda w: YT @ w)


def _stable_norm(z: np.ndarray) -> float:
    """Euclidean norm robust to squared-entry overflow/underflow."""
    nrm = float(np.linalg.norm(z))
    if np.isfinite(nrm) and nrm > 1e-140:
        return nrm
    m = float(np.max(np.abs(z))) if z.size else 0.0
    if m == 0.0 or not np.isfinite(m):
        return m
    return m * float(np.linalg.norm(z / m))


# ---------------------------------------------------------------- power chain

def power_chain(applyX, u, k: int) -> PowerChainResult:
    """Run k normalized power steps and close with one more application.

    The multiplicative norm factors are kept as a running sum of logarithms,
    so the returned ``value`` is finite whenever the eigenvalues are
    representable, for any chain length.  Operator applications: exactly
    ``k + 1``.  Raises :class:`KernelHit` if an iterate's image (squared
    norm) or the final Rayleigh quotient falls to ``KERNEL_EPS`` or below.
    """
    if k < 0:
        raise ValueError(f"chain length must be nonnegative, got {k}")
    u = _check_unit(u)
    apply = _as_apply(applyX)
    y = u
    sigma = 0.0
    for _ in range(k):
        z = np.asarray(apply(y), dtype=np.float64)
        nrm = _stable_norm(z)
        if not nrm > _KERNEL_NORM:
            raise KernelHit("power chain iterate vanished")
        y = z / nrm
        sigma += 2.0 * math.log(nrm)
    t = np.asarray(apply(y), dtype=np.float64)
    rayleigh = float(y @ t)
    if not rayleigh > KERNEL_EPS:
        raise KernelHit("Rayleigh quotient vanished")
    if k == 0:
        value = rayleigh  # degree 1: the quotient itself, no log round-trip
    else:
        value = math.exp((math.log(rayleigh) + sigma) / (2 * k + 1))
    return PowerChainResult(y=y, log_norm_accum=sigma, rayleigh=rayleigh, value=value)


def sample_value(applyX, u, p) -> float:
    """One directional sample of the degree-p power mean; kernel draws give 0."""
    k = _check_degree(p)
    try:
        return power_chain(applyX, u, k).value
    except KernelHit:
        return 0.0


def sample_gradient(applyX, u, p) -> RankOneSym:
    """Unbiased rank-one gradient sample for the degree-p power mean.

    ``scale = value / rayleigh`` never exceeds 1; contracting the sample
    against X reproduces the sampled value exactly.  Kernel draws return the
    zero sample.
    """
    k = _check_degree(p)
    u = _check_unit(u)
    try:
        r = power_chain(applyX, u, k)
    except KernelHit:
        return RankOneSym(scale=0.0, direction=np.zeros_like(u))
    scale = 1.0 if k == 0 else r.value / r.rayleigh
    return RankOneSym(scale=scale, direction=r.y)


def estimate_power_mean(applyX, dim: int, p, samples: int, rng: RngStream):
    """Monte-Carlo mean and standard error of the degree-p directional value."""
    _check_degree(p)
    if samples < 2:
        raise ValueError(f"need at least 2 samples, got {samples}")
    apply = _as_apply(applyX)
    vals = np.empty(samples, dtype=np.float64)
    for i in range(samples):
        u = sample_unit_sphere(rng, dim)
        vals[i] = sample_value(apply, u, p)
    mean = float(np.mean(vals))
    stderr = float(np.std(vals, ddof=1) / math.sqrt(samples))
    return mean, stderr


def approximation_ratio(p: int, n: int) -> float:
    """Lower-bound factor ``p/(p+2) * n^(-1/p)`` relating the degree-p mean
    to the top eigenvalue in dimension n.  Lies in (0, 1], increases to 1 as
    p grows.  Defined for any positive integer degree."""
    if not isinstance(p, (int, np.integer)) or not isinstance(n, (int, np.integer)):
        raise ValueError("p and n must be integers")
    if p < 1 or n < 1:
        raise ValueError(f"p and n must be positive, got p={p}, n={n}")
    return p / (p + 2.0) * float(n) ** (-1.0 / p)


# ----------------------------------------------- factored / composed samples

def gram_gradient_sample(Y, u, p) -> RankOneRect:
    """Rank-one gradient sample for the degree-p mean of Y Y^T.

    The Gram operator is never materialized: the chain alternates single
    products with Y^T and Y, and the closing adjoint product both yields the
    Rayleigh quotient (as its squared norm) and is reused as the right
    factor, for exactly p single-factor products per sample.
    """
    k = _check_degree(p)
    u = _check_unit(u)
    apply, apply_t = _pair_ops(Y)
    y = u
    sigma = 0.0
    t = None
    try:
        for _ in range(k):
            t = np.asarray(apply_t(y), dtype=np.float64)
            z = np.asarray(apply(t), dtype=np.float64)
            nrm = _stable_norm(z)
            if not nrm > _KERNEL_NORM:
                raise KernelHit("gram chain iterate vanished")
            y = z / nrm
            sigma += 2.0 * math.log(nrm)
        t = np.asarray(apply_t(y), dtype=np.float64)
        nrm_t = _stable_norm(t)
        if not nrm_t > _KERNEL_NORM:
            raise KernelHit("Rayleigh quotient vanished")
        log_rayleigh = 2.0 * math.log(nrm_t)
        scale = 1.0 if k == 0 else math.exp((log_rayleigh + sigma) / p - log_rayleigh)
        return RankOneRect(left=2.0 * scale * y, right=t)
    except KernelHit:
        assert t is not None
        return RankOneRect(left=np.zeros_like(y), right=np.zeros_like(t))


def square_gradient_sample(applyS, u, p) -> RankTwoSym:
    """Symmetric rank-two gradient sample for the degree-p mean of S^2.

    S need not be PSD.  With (scale, y) the rank-one sample for S^2 and
    w = S y, the sample is ``scale*y w^T + w scale*y^T``; exactly p
    applications of S per sample.
    """
    k = _check_degree(p)
    u = _check_unit(u)
    apply = _as_apply(applyS)
    y = u
    sigma = 0.0
    try:
        for _ in range(k):
            t = np.asarray(apply(y), dtype=np.float64)
            z = np.asarray(apply(t), dtype=np.float64)
            nrm = _stable_norm(z)
            if not nrm > _KERNEL_NORM:
                raise KernelHit("square chain iterate vanished")
            y = z / nrm
            sigma += 2.0 * math.log(nrm)
        t = np.asarray(apply(y), dtype=np.float64)
        nrm_t = _stable_norm(t)
        if not nrm_t > _KERNEL_NORM:
            raise KernelHit("Rayleigh quotient vanished")
        log_rayleigh = 2.0 * math.log(nrm_t)
        scale = 1.0 if k == 0 else math.exp((log_rayleigh + sigma) / p - log_rayleigh)
        return RankTwoSym(v=scale * y, w=t)
    except KernelHit:
        zero = np.zeros_like(u)
        return RankTwoSym(v=zero, w=zero.copy())


def power_iteration_sample(Y, u, q: int) -> RankOneRect:
    """Heuristic rectangular sample: q power-iteration steps toward the top
    left singular direction, then ``left = 2 v, right = Y^T v``.

    Same shape as :func:`gram_gradient_sample` but with the power-mean weight
    replaced by the constant 2; uses ``2q + 1`` single-factor products.
    """
    if q < 0:
        raise ValueError(f"iteration count must be nonnegative, got {q}")
    u = _check_unit(u)
    apply, apply_t = _pair_ops(Y)
    y = u
    t = None
    try:
        for _ in range(q):
            t = np.asarray(apply_t(y), dtype=np.float64)
            z = np.asarray(apply(t), dtype=np.float64)
            nrm = _stable_norm(z)
            if not nrm > _KERNEL_NORM:
                raise KernelHit("power iteration vanished")
            y = z / nrm
        t = np.asarray(apply_t(y), dtype=np.float64)
        return RankOneRect(left=2.0 * y, right=t)
    except KernelHit:
        assert t is not None
        return RankOneRect(left=np.zeros_like(y), right=np.zeros_like(t))
