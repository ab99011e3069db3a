"""Experiment data generators and the task runner behind the CLI.

Both generators produce instances whose optimal value is exactly 1 at x = 0:
the target C is rectangular-diagonal with top-left entry 1 and the remaining
diagonal entries uniform in [-1, 1], while every basis matrix has a zero in
the top-left corner, so any candidate residual keeps an entry of magnitude 1
there and no coefficient vector can do better than x = 0.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import sparse

from .errors import ParameterError
from .matrices import RngStream, as_sparse
from .regression import RegressionProblem, make_problem, solve_regression
from .trace import RunTrace


def _check_dims(d: int, n: int, m: int) -> None:
    if d < 1:
        raise ParameterError(f"d must be at least 1, got {d}")
    if n < 1 or m < 1:
        raise ParameterError(f"matrix dimensions must be positive, got {n} x {m}")


def _gen_target(gen: np.random.Generator, n: int, m: int) -> np.ndarray:
    C = np.zeros((n, m))
    C[0, 0] = 1.0
    r = min(n, m)
    if r > 1:
        diag = gen.uniform(-1.0, 1.0, size=r - 1)
        C[np.arange(1, r), np.arange(1, r)] = diag
    return C


def gen_dense(d: int, n: int, m: int, seed: int = 0) -> RegressionProblem:
    """Random dense instance with known optimum f* = 1 at x = 0.

    Basis matrices have independent Uniform[-1, 1] entries with the (0, 0)
    entry zeroed.  Draw order is fixed for reproducibility: the min(n,m)-1
    free target diagonal entries first, then the d basis matrices in index
    order, all from the data substream of the seed.
    """
    _check_dims(d, n, m)
    gen = RngStream(seed, RngStream.DATA).generator
    C = _gen_target(gen, n, m)
    mats = []
    for _ in range(d):
        A = gen.uniform(-1.0, 1.0, size=(n, m))
        A[0, 0] = 0.0
        mats.append(A)
    return make_problem(C, mats)


def gen_sparse(d: int, n: int, m: int, s: int = 5, seed: int = 0) -> RegressionProblem:
    """Random sparse instance: exactly s stored entries per column of every
    basis matrix, rows sampled without replacement, with column 0 excluding
    row 0 (so the (0, 0) corner stays structurally zero and f* = 1 at x = 0).

    Requires 1 <= s <= n - 1 so the excluded column still has s rows to
    choose from.  Draw order per basis matrix: the s-row subset of each
    column left to right, then all s*m values in one draw.
    """
    _check_dims(d, n, m)
    if not 1 <= s <= n - 1:
        raise ParameterError(f"s must lie in [1, n-1] = [1, {n - 1}], got {s}")
    gen = RngStream(seed, RngStream.DATA).generator
    C = _gen_target(gen, n, m)
    mats = []
    for _ in range(d):
        rows = np.empty((m, s), dtype=np.int64)
        for j in range(m):
            if j == 0:
                rows[j] = 1 + gen.choice(n - 1, size=s, replace=False)
            else:
                rows[j] = gen.choice(n, size=s, replace=False)
        cols = np.repeat(np.arange(m, dtype=np.int64), s)
        vals = gen.uniform(-1.0, 1.0, size=s * m)
        A = sparse.csc_array((vals, (rows.reshape(-1), cols)), shape=(n, m))
        mats.append(as_sparse(A))
    return make_problem(C, mats)


@dataclass
class TaskSpec:
    """One experiment: data shape and mode, target accuracy, seed, oracle
    kind, and run switches."""

    mode: str
    d: int
    n: int
    m: int
    s: int = 5
    delta: float = 0.01
    seed: int = 0
    oracle: str = "new"
    early_stop: bool = True
    eval_geometric: bool = True


def build_problem(task: TaskSpec) -> RegressionProblem:
    if task.mode == "dense":
        return gen_dense(task.d, task.n, task.m, task.seed)
    if task.mode == "sparse":
        return gen_sparse(task.d, task.n, task.m, task.s, task.seed)
    raise ParameterError(f"mode must be 'dense' or 'sparse', got {task.mode!r}")


def run_task(task: TaskSpec, out_path=None) -> RunTrace:
    """Generate the task's data, solve it, and (optionally) stream the trace
    to ``out_path``.  I/O failures are surfaced with the path attached."""
    prob = build_problem(task)
    extra = {"mode": task.mode}
    if task.mode == "sparse":
        extra["s"] = str(task.s)
    try:
        return solve_regression(
            prob,
            delta=task.delta,
            seed=task.seed,
            oracle=task.oracle,
            early_stop=task.early_stop,
            eval_geometric=task.eval_geometric,
            trace_path=out_path,
            extra_meta=extra,
        )
    except OSError as exc:
        raise OSError(f"{out_path}: {exc}") from exc


def compare_oracles(
    task: TaskSpec, out_new=None, out_pi=None
) -> dict[str, RunTrace]:
    """Run the same task under both oracle kinds with identical seeds.

    Data and the per-iteration direction draws are shared (same substreams),
    the polynomial degree p is shared, and only the oracle's constants
    differ: (beta_p, 2/beta_p) for the unbiased kind versus (1, 2) for the
    power-iteration heuristic, which also shifts its iteration budget."""
    results: dict[str, RunTrace] = {}
    for kind, path in (("new", out_new), ("power-iteration", out_pi)):
        results[kind] = run_task(dataclasses.replace(task, oracle=kind), path)
    return results
