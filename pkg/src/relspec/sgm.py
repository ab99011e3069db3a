"""Averaging stochastic gradient method with multiplicative accuracy control.

The solver minimizes over all of R^d.  Its prox steps live in the seminorm
induced by a PSD Gram matrix B: each step solves ``B s = -g`` (minimum-norm
when B is singular).  Output is a running convex combination of prox centers
with weights ``c_k = a_k (1 - L a_k)``, which is what turns an absolute
bound into a size-relative one.  Step-size rules and iteration budgets for
the three supported regimes (fixed target ratio, fixed horizon, composed
smooth surrogate) are provided alongside.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .errors import IllConditionedError, NumericalFailure, ParameterError

__all__ = [
    "GramSystem",
    "SolverState",
    "gradient_step",
    "iteration_budget",
    "iteration_budget_composition",
    "sgm_run",
    "step_composition",
    "step_constant_delta",
    "step_fixed_horizon_optimal",
]


class GramSystem:
    """Symmetric PSD matrix with a prepared solver for repeated right-hand sides.

    Always prepares an eigendecomposition-based pseudo-solve (eigenvalues
    below ``1e-12 * lambda_max`` treated as zero, so solutions carry no
    kernel component).  When the matrix is numerically positive definite
    (``lambda_min > 1e-10 * lambda_max``) a Cholesky factorization is also
    prepared and used by default for speed; the two paths agree to 1e-8 on
    nondegenerate inputs.
    """

    def __init__(self, B):
        B = np.asarray(B, dtype=np.float64)
        if B.ndim != 2 or B.shape[0] != B.shape[1]:
            raise ValueError(f"Gram matrix must be square, got shape {B.shape}")
        scale = float(np.abs(B).max()) if B.size else 0.0
        if float(np.abs(B - B.T).max()) > 1e-12 * max(1.0, scale):
            raise ValueError("Gram matrix must be symmetric")
        sym = (B + B.T) / 2.0
        w, V = np.linalg.eigh(sym)
        lam_max = float(w[-1]) if w.size else 0.0
        spec = float(np.abs(w).max()) if w.size else 0.0
        if w.size and float(w[0]) < -1e-10 * max(spec, 1e-300):
            raise ValueError(f"Gram matrix is not PSD (min eigenvalue {w[0]:.3e})")
        cutoff = 1e-12 * max(lam_max, 0.0)
        self.B = sym
        self.dim = B.shape[0]
        self.norm = max(lam_max, 0.0)
        self._V = V
        self._inv_w = np.where(w > cutoff, 1.0 / np.where(w > cutoff, w, 1.0), 0.0)
        self._cho = None
        if lam_max > 0.0 and float(w[0]) > 1e-10 * lam_max:
            self._cho = cho_factor(sym)

    def solve(self, rhs, method: str = "auto") -> np.ndarray:
        """Minimum-norm solution of ``B s = rhs`` (least-squares when singular)."""
        rhs = np.asarray(rhs, dtype=np.float64)
        if rhs.shape != (self.dim,):
            raise ValueError(f"rhs has shape {rhs.shape}, expected ({self.dim},)")
        if method == "auto":
            method = "cholesky" if self._cho is not None else "eig"
        if method == "cholesky":
            if self._cho is None:
                raise ValueError("matrix is not positive definite; no Cholesky path")
            return cho_solve(self._cho, rhs)
        if method == "eig":
            return self._V @ (self._inv_w * (self._V.T @ rhs))
        raise ValueError(f"unknown solve method {method!r}")


@dataclass
class SolverState:
    """Iteration count, prox center v, averaged point x, and weight total C."""

    k: int
    v: np.ndarray
    x: np.ndarray
    C: float


def gradient_step(gram: GramSystem, x_bar, g) -> np.ndarray:
    """Prox step in the B-seminorm: ``x_bar + s`` with ``B s = -g`` (min-norm).

    Verifies the achieved residual ``||B s + g||`` against
    ``1e-8 * (||g|| + ||B|| ||s||)`` and raises :class:`IllConditionedError`
    (with the residual attached) when the gradient cannot be represented in
    the range of B.
    """
    x_bar = np.asarray(x_bar, dtype=np.float64)
    g = np.asarray(g, dtype=np.float64)
    s = gram.solve(-g)
    residual = float(np.linalg.norm(gram.B @ s + g))
    tol = 1e-8 * (float(np.linalg.norm(g)) + gram.norm * float(np.linalg.norm(s)))
    if residual > tol:
        raise IllConditionedError(
            f"gradient step residual {residual:.3e} exceeds tolerance {tol:.3e}",
            residual=residual,
        )
    return x_bar + s


# --------------------------------------------------------------- step rules

def step_constant_delta(delta: float, L: float) -> float:
    """Constant step ``delta / (2 L)`` targeting accuracy ratio delta."""
    if not 0.0 < delta < 1.0:
        raise ParameterError(f"delta must lie in (0,1), got {delta}")
    if L <= 0.0:
        raise ParameterError(f"L must be positive, got {L}")
    return delta / (2.0 * L)


def step_fixed_horizon_optimal(N: int, gamma0: float, L: float) -> float:
    """Best constant step for a fixed budget of N iterations.

    The unique positive root of ``2 gamma0 N L a^2 + 2 L a = 1``, written in
    the subtraction-free form ``1 / (sqrt(2 gamma0 N L + L^2) + L)``.
    """
    if N < 1:
        raise ParameterError(f"N must be at least 1, got {N}")
    if gamma0 <= 0.0 or L <= 0.0:
        raise ParameterError("gamma0 and L must be positive")
    return 1.0 / (math.sqrt(2.0 * gamma0 * N * L + L * L) + L)


def step_composition(Delta: float, beta_p: float, L_p: float) -> float:
    """Step ``Delta / (4 beta_p L_p)`` for the smoothed-surrogate composition.

    Requires ``beta_p >= 1 - Delta/2`` so that solving the surrogate to
    ratio Delta solves the original problem to the caller's target ratio.
    """
    if not 0.0 < Delta < 1.0:
        raise ParameterError(f"Delta must lie in (0,1), got {Delta}")
    if beta_p <= 0.0 or L_p <= 0.0:
        raise ParameterError("beta_p and L_p must be positive")
    if beta_p < 1.0 - Delta / 2.0:
        raise ParameterError(
            f"approximation ratio {beta_p} below required {1.0 - Delta / 2.0}"
        )
    return Delta / (4.0 * beta_p * L_p)


def iteration_budget(delta: float, gamma0: float, L: float, improved: bool = False) -> int:
    """Iterations guaranteeing expected ratio delta: ``ceil(2 L / (gamma0 delta^2))``.

    ``improved=True`` applies the sharper ``(1 - delta)`` factor variant.
    """
    if not 0.0 < delta < 1.0:
        raise ParameterError(f"delta must lie in (0,1), got {delta}")
    if gamma0 <= 0.0 or L <= 0.0:
        raise ParameterError("gamma0 and L must be positive")
    val = 2.0 * L / (gamma0 * delta * delta)
    if improved:
        val *= 1.0 - delta
    return int(math.ceil(val))


def iteration_budget_composition(
    Delta: float, gamma0: float, beta_p: float, L_p: float
) -> int:
    """Budget for the composed run: ``ceil(8 beta_p^2 L_p / (gamma0 Delta^2))``."""
    if not 0.0 < Delta < 1.0:
        raise ParameterError(f"Delta must lie in (0,1), got {Delta}")
    if gamma0 <= 0.0 or beta_p <= 0.0 or L_p <= 0.0:
        raise ParameterError("gamma0, beta_p, L_p must be positive")
    return int(math.ceil(8.0 * beta_p * beta_p * L_p / (gamma0 * Delta * Delta)))


# -------------------------------------------------------------------- solver

StepPolicy = Union[float, Callable[[int], float]]


def sgm_run(
    oracle: Callable[[np.ndarray], np.ndarray],
    gram: GramSystem,
    policy: StepPolicy,
    L: float,
    x0,
    N: int,
    observer: Optional[Callable[[SolverState], object]] = None,
) -> SolverState:
    """Run N averaging-SGM iterations from x0 and return the final state.

    Per iteration k: ``g = oracle(v_k)``; ``c_k = a_k (1 - L a_k)``;
    ``x_{k+1} = (C_k x_k + c_k v_k) / C_{k+1}``;
    ``v_{k+1} = gradient_step(gram, v_k, a_k g)``.  The oracle sees only the
    prox center; randomness is whatever the oracle closes over, so equal
    seeds give bitwise-equal trajectories.  ``policy`` is a constant step or
    a map ``k -> a_k``; every resolved step must lie strictly inside
    ``(0, 1/L)``.  The observer runs after each iteration and may return
    truthy to stop early.  Non-finite iterates raise
    :class:`NumericalFailure` with the iteration index.
    """
    if L <= 0.0:
        raise ParameterError(f"L must be positive, got {L}")
    if N < 0:
        raise ParameterError(f"N must be nonnegative, got {N}")
    step_of = policy if callable(policy) else (lambda _k: policy)
    v = np.array(x0, dtype=np.float64, copy=True)
    x = v.copy()
    C = 0.0
    done = 0
    for k in range(N):
        g = np.asarray(oracle(v), dtype=np.float64)
        if not np.isfinite(g).all():
            raise NumericalFailure("oracle returned a non-finite gradient", iteration=k)
        a = float(step_of(k))
        if not 0.0 < a < 1.0 / L:
            raise ParameterError(f"step {a} at iteration {k} outside (0, {1.0 / L})")
        c = a * (1.0 - L * a)
        C_new = C + c
        x = (C * x + c * v) / C_new
        C = C_new
        v = gradient_step(gram, v, a * g)
        done = k + 1
        if not (np.isfinite(v).all() and np.isfinite(x).all()):
            raise NumericalFailure("iterate became non-finite", iteration=k)
        if observer is not None and observer(SolverState(k=done, v=v, x=x, C=C)):
            break
    return SolverState(k=done, v=v, x=x, C=C)
