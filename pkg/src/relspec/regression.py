"""Spectral-norm linear regression.

Assembles the pieces: a problem container for minimize_x ||sum_i x_i A_i - C||
in the largest-singular-value norm, the linear-operator and adjoint actions,
the Gram system of the basis, the full parameter-selection chain for a target
relative accuracy, and the end-to-end stochastic solver that emits run traces.
"""
from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from scipy import sparse
from scipy.io import mmread, mmwrite

from .errors import NumericalFailure, ParameterError
from .evaluation import EvalConfig, relative_accuracy, spectral_norm_power
from .matrices import RngStream, as_dense, as_sparse, sample_unit_sphere
from .oracles import (
    approximation_ratio,
    gram_gradient_sample,
    power_iteration_sample,
)
from .sgm import (
    GramSystem,
    gradient_step,
    iteration_budget_composition,
    sgm_run,
    step_composition,
)
from .trace import RunTrace, TraceRow, TraceWriter

ORACLE_KINDS = ("new", "power-iteration")


@dataclass(eq=False)
class RegressionProblem:
    """Immutable problem data: target C (dense n x m with n <= m) and a basis
    of d matrices of the same shape, each dense ndarray or CSC sparse.

    Construct through :func:`make_problem`, which canonicalizes storage,
    transposes tall inputs, and prepares the fast-path representations
    (a dense (d, n, m) stack, or a flat (n*m, d) sparse matrix plus
    triplet arrays for adjoint contractions).
    """

    C: np.ndarray
    basis: tuple
    d: int
    n: int
    m: int
    _stack: Optional[np.ndarray] = field(default=None, repr=False)
    _flat: Optional[sparse.csc_array] = field(default=None, repr=False)
    _adj: Optional[tuple] = field(default=None, repr=False)

    @property
    def is_sparse(self) -> bool:
        return self._flat is not None


def make_problem(C, basis: Sequence) -> RegressionProblem:
    """Validate and canonicalize problem data.

    All matrices must share C's shape.  If C is tall (more rows than
    columns) everything is transposed so the working orientation always has
    n <= m; the objective is invariant under joint transposition.  A basis
    with any sparse member is stored entirely sparse.
    """
    C = as_dense(C)
    if not basis:
        raise ValueError("basis must contain at least one matrix")
    shape = C.shape
    use_sparse = any(sparse.issparse(A) for A in basis)
    mats = []
    for i, A in enumerate(basis):
        A = as_sparse(A) if use_sparse else as_dense(A)
        if A.shape != shape:
            raise ValueError(
                f"basis matrix {i} has shape {A.shape}, expected {shape}"
            )
        mats.append(A)
    if shape[0] > shape[1]:
        C = np.ascontiguousarray(C.T)
        mats = [as_sparse(A.T) if use_sparse else np.ascontiguousarray(A.T) for A in mats]
    n, m = C.shape
    d = len(mats)

    stack = flat = adj = None
    if use_sparse:
        rows_all, flat_idx_all, owner_all, vals_all = [], [], [], []
        cols_all = []
        for j, A in enumerate(mats):
            coo = sparse.coo_array(A)
            r = coo.coords[0].astype(np.int64)
            c = coo.coords[1].astype(np.int64)
            rows_all.append(r)
            cols_all.append(c)
            flat_idx_all.append(r * m + c)
            owner_all.append(np.full(r.size, j, dtype=np.int64))
            vals_all.append(coo.data.astype(np.float64))
        owner = np.concatenate(owner_all) if owner_all else np.zeros(0, dtype=np.int64)
        flat = sparse.csc_array(
            (np.concatenate(vals_all), (np.concatenate(flat_idx_all), owner)),
            shape=(n * m, d),
        )
        adj = (
            np.concatenate(rows_all),
            np.concatenate(cols_all),
            np.concatenate(vals_all),
            owner,
        )
    else:
        stack = np.stack(mats)

    return RegressionProblem(
        C=C, basis=tuple(mats), d=d, n=n, m=m, _stack=stack, _flat=flat, _adj=adj
    )


def _check_coeffs(prob: RegressionProblem, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (prob.d,):
        raise ValueError(f"coefficient vector has shape {x.shape}, expected ({prob.d},)")
    return x


def operator_apply(prob: RegressionProblem, x) -> np.ndarray:
    """Dense n x m accumulation sum_i x_i A_i."""
    x = _check_coeffs(prob, x)
    if prob._stack is not None:
        return np.tensordot(x, prob._stack, axes=1)
    return (prob._flat @ x).reshape(prob.n, prob.m)


def adjoint_apply_rank_one(prob: RegressionProblem, left, right) -> np.ndarray:
    """Component i of the adjoint at the rank-one matrix left*right^T:
    left^T A_i right, computed without ever densifying the rank-one factor."""
    left = np.asarray(left, dtype=np.float64)
    right = np.asarray(right, dtype=np.float64)
    if left.shape != (prob.n,) or right.shape != (prob.m,):
        raise ValueError(
            f"factor shapes {left.shape}, {right.shape} do not match ({prob.n},), ({prob.m},)"
        )
    if prob._stack is not None:
        return (prob._stack @ right) @ left
    rows, cols, vals, owner = prob._adj
    if vals.size == 0:
        return np.zeros(prob.d)
    return np.bincount(
        owner, weights=vals * left[rows] * right[cols], minlength=prob.d
    )


def _adjoint_full(prob: RegressionProblem, H: np.ndarray) -> np.ndarray:
    """Adjoint at a general dense matrix: (<A_i, H>)_i."""
    if prob._stack is not None:
        return np.tensordot(prob._stack, H, axes=2)
    return prob._flat.T @ H.reshape(-1)


def build_gram(prob: RegressionProblem) -> GramSystem:
    """Gram system of the basis: B_ij = <A_i, A_j> (Frobenius)."""
    if prob._stack is not None:
        F = prob._stack.reshape(prob.d, -1)
        B = F @ F.T
    else:
        B = (prob._flat.T @ prob._flat).toarray()
    return GramSystem((B + B.T) / 2.0)


# ------------------------------------------------------- parameter selection

@dataclass(frozen=True)
class RunParameters:
    """The full accuracy-to-budget chain for one run at target ratio delta."""

    delta: float
    Delta: float
    p: int
    beta_p: float
    L_p: float
    a: float
    N: int


def select_parameters(delta: float, n: int) -> RunParameters:
    """Derive every run constant from the target ratio and the row count.

    Delta = (2 - delta) * delta is the ratio targeted for the squared
    objective; the polynomial degree is p = 2k + 1 with
    k = floor((ln n + 2) / Delta), the smallest odd degree making the
    power-mean surrogate tight enough (beta_p >= 1 - Delta/2 always holds
    under this rule); the step and budget come from the surrogate's
    constants with gamma0 = 1/n.
    """
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
        raise ParameterError(f"n must be an integer, got {n!r}")
    if n < 2:
        raise ParameterError(f"n must be at least 2, got {n}")
    if not 0.0 < delta < 1.0:
        raise ParameterError(f"delta must lie in (0,1), got {delta}")
    Delta = (2.0 - delta) * delta
    k = int(math.floor((math.log(n) + 2.0) / Delta))
    p = 2 * k + 1
    beta_p = approximation_ratio(p, int(n))
    L_p = 2.0 / beta_p
    a = step_composition(Delta, beta_p, L_p)
    N = iteration_budget_composition(Delta, 1.0 / n, beta_p, L_p)
    return RunParameters(delta=delta, Delta=Delta, p=p, beta_p=beta_p, L_p=L_p, a=a, N=N)


# ----------------------------------------------------------- solver assembly

def initial_point(prob: RegressionProblem, gram: Optional[GramSystem] = None) -> np.ndarray:
    """Least-squares warm start: the prox step from zero against -adjoint(C)."""
    if gram is None:
        gram = build_gram(prob)
    g = -_adjoint_full(prob, prob.C)
    return gradient_step(gram, np.zeros(prob.d), g)


def _rank_one_sample(Y, u, p: int, kind: str, q: Optional[int] = None):
    if kind == "new":
        return gram_gradient_sample(Y, u, p)
    if kind == "power-iteration":
        if q is None:
            q = (p - 1) // 2
        return power_iteration_sample(Y, u, q)
    raise ValueError(f"oracle kind must be one of {ORACLE_KINDS}, got {kind!r}")


def regression_oracle(
    prob: RegressionProblem, x, u, p: int, kind: str, q: Optional[int] = None
) -> np.ndarray:
    """One stochastic subgradient of the regression objective at x.

    Materializes the residual Y = operator_apply(x) - C, draws the rank-one
    factored sample for the requested oracle kind, and contracts it against
    the basis through the adjoint."""
    x = _check_coeffs(prob, x)
    Y = operator_apply(prob, x) - prob.C
    s = _rank_one_sample(Y, u, p, kind, q)
    return adjoint_apply_rank_one(prob, s.left, s.right)


def _checkpoints(N: int, geometric: bool) -> set[int]:
    if not geometric:
        return set(range(1, N + 1))
    cps = {N}
    c = 1
    while c <= N:
        cps.add(c)
        c *= 2
    return cps


def solve_regression(
    prob: RegressionProblem,
    delta: float,
    seed: int,
    oracle: str = "new",
    f_star: float = 1.0,
    early_stop: bool = True,
    eval_geometric: bool = True,
    eval_cfg: Optional[EvalConfig] = None,
    trace_path=None,
    gram: Optional[GramSystem] = None,
    extra_meta: Optional[dict] = None,
) -> RunTrace:
    """Run the averaged stochastic subgradient solver on ``prob`` to target
    relative accuracy ``delta`` and return the checkpoint trace.

    The parameter chain is selected from (delta, n).  The unbiased oracle
    runs with its own constants (beta_p, 2/beta_p); the power-iteration
    heuristic runs with (1, 2) and q = (p-1)/2, so both perform the same
    p single-factor products per call.  At each checkpoint the averaged
    point's objective is measured with the power-method evaluator, the
    relative accuracy against ``f_star`` is recorded, and (optionally) the
    run stops once it reaches the target.  With ``trace_path`` set, rows are
    flushed to disk as they are produced."""
    if oracle not in ORACLE_KINDS:
        raise ValueError(f"oracle kind must be one of {ORACLE_KINDS}, got {oracle!r}")
    if not f_star > 0.0:
        raise ParameterError(f"f_star must be positive, got {f_star}")
    params = select_parameters(delta, prob.n)
    if oracle == "new":
        beta, L = params.beta_p, params.L_p
    else:
        beta, L = 1.0, 2.0
    q = (params.p - 1) // 2
    a = step_composition(params.Delta, beta, L)
    N = iteration_budget_composition(params.Delta, 1.0 / prob.n, beta, L)

    if gram is None:
        gram = build_gram(prob)
    x0 = initial_point(prob, gram)
    rng_oracle = RngStream(seed, RngStream.ORACLE)
    rng_eval = RngStream(seed, RngStream.EVAL)
    cfg = eval_cfg if eval_cfg is not None else EvalConfig()
    counters = {"matvecs_oracle": 0, "matvecs_eval": 0}
    cps = _checkpoints(N, eval_geometric)

    meta = dict(extra_meta or {})
    meta.update(
        {
            "d": str(prob.d),
            "n": str(prob.n),
            "m": str(prob.m),
            "delta": repr(float(delta)),
            "Delta": repr(params.Delta),
            "p": str(params.p),
            "beta": repr(beta),
            "L": repr(L),
            "a": repr(a),
            "N": str(N),
            "seed": str(seed),
            "oracle": oracle,
            "f_star": repr(float(f_star)),
        }
    )

    def oracle_fn(v: np.ndarray) -> np.ndarray:
        Y = operator_apply(prob, v) - prob.C
        YT = Y.T

        def apply(vec):
            counters["matvecs_oracle"] += 1
            return Y @ vec

        def apply_t(w):
            counters["matvecs_oracle"] += 1
            return YT @ w

        u = sample_unit_sphere(rng_oracle, prob.n)
        s = _rank_one_sample((apply, apply_t), u, params.p, oracle, q)
        return adjoint_apply_rank_one(prob, s.left, s.right)

    rows: list[TraceRow] = []
    stopped = False
    writer = TraceWriter(trace_path, meta) if trace_path is not None else None
    t0 = time.monotonic()

    def observer(state) -> bool:
        nonlocal stopped
        k = state.k
        if k not in cps:
            return False
        Yx = operator_apply(prob, state.x) - prob.C
        est = spectral_norm_power(Yx, cfg, rng=rng_eval)
        counters["matvecs_eval"] += est.products
        if not math.isfinite(est.value):
            raise NumericalFailure("objective estimate is not finite", iteration=k)
        dk = relative_accuracy(est.value, f_star)
        row = TraceRow(
            iter=k,
            f_est=est.value,
            delta_k=dk,
            matvecs=counters["matvecs_oracle"] + counters["matvecs_eval"],
            elapsed_s=time.monotonic() - t0,
        )
        rows.append(row)
        if writer is not None:
            writer.write_row(row)
        if early_stop and dk <= delta:
            stopped = True
            return True
        return False

    try:
        sgm_run(oracle_fn, gram, a, L, x0, N, observer=observer)
        status = "early_stop" if stopped else "budget_exhausted"
        if writer is not None:
            writer.finalize(status, counters)
    finally:
        if writer is not None:
            writer.close()
    return RunTrace(meta=meta, rows=rows, status=status, counters=dict(counters))


# ------------------------------------------------------------------ file I/O

def save_problem(path, prob: RegressionProblem) -> None:
    """Persist a problem as Matrix Market files plus a JSON manifest.

    The directory receives ``C.mtx`` (dense array format), one file per
    basis matrix (coordinate format when sparse, array format when dense),
    and ``manifest.json`` mapping roles to file names."""
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    mmwrite(path / "C.mtx", prob.C)
    names = []
    for i, A in enumerate(prob.basis):
        name = f"A_{i:04d}.mtx"
        mmwrite(path / name, A)
        names.append(name)
    manifest = {"c": "C.mtx", "basis": names}
    (path / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")


def load_problem(path) -> RegressionProblem:
    """Load a problem saved by :func:`save_problem` (shapes revalidated)."""
    path = Path(path)
    manifest = json.loads((path / "manifest.json").read_text())
    C = as_dense(np.asarray(mmread(path / manifest["c"])))
    basis = []
    for name in manifest["basis"]:
        M = mmread(path / name)
        basis.append(as_sparse(M) if sparse.issparse(M) else as_dense(np.asarray(M)))
    return make_problem(C, basis)
