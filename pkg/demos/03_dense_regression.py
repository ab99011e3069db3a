"""End-to-end solves of spectral regression tasks, with their traces.

Part 1 runs the experiment harness on a generated dense instance whose
optimal value is known to be exactly 1 (the target's top-left entry is 1
and no basis matrix touches it, so the best achievable residual keeps that
entry).  We print the derived run parameters, stream the solve into a CSV
trace, then read the file back and walk through what it recorded.

Part 2 builds a two-by-two instance by hand where the least-squares warm
start is far from optimal, so the checkpoint trace shows the method
actually descending instead of stopping at its first measurement.
"""
import pathlib

import numpy as np

from relspec import (
    TaskSpec,
    make_problem,
    parse_trace,
    run_task,
    select_parameters,
    solve_regression,
    spectral_norm_exact,
)

out_dir = pathlib.Path(__file__).resolve().parent / "out"
out_dir.mkdir(exist_ok=True)
trace_path = out_dir / "dense_run.csv"

task = TaskSpec(mode="dense", d=8, n=30, m=60, delta=0.05, seed=3)

params = select_parameters(task.delta, task.n)
print(f"task: d={task.d} matrices of shape {task.n}x{task.m}, "
      f"target ratio delta={task.delta}")
print(f"derived parameters: surrogate ratio Delta={params.Delta:.6f}, "
      f"degree p={params.p},")
print(f"  approximation factor beta_p={params.beta_p:.6f}, "
      f"smoothness L_p={params.L_p:.6f},")
print(f"  step a={params.a:.6f}, iteration budget N={params.N}")
print()

trace = run_task(task, out_path=trace_path)
print(f"solver finished with status {trace.status!r}; trace written to "
      f"{trace_path.name}")
print()

back = parse_trace(trace_path)
print("metadata recorded in the file:")
for key in ("mode", "d", "n", "m", "delta", "p", "N", "seed", "oracle"):
    print(f"  {key} = {back.meta[key]}")
print()

print("checkpoint rows (objective estimate, relative accuracy, work):")
print(f"{'iter':>8} {'f_est':>12} {'delta_k':>12} {'matvecs':>10}")
for row in back.rows:
    print(f"{row.iter:>8} {row.f_est:>12.6f} {row.delta_k:>12.3e} "
          f"{row.matvecs:>10}")
print()

oracle_work = back.counters["matvecs_oracle"]
eval_work = back.counters["matvecs_eval"]
print(f"work split: {oracle_work} single-matrix products inside the oracle, "
      f"{eval_work} inside evaluation")
print("the least-squares warm start already sits near the optimum for this")
print("instance family, so the first checkpoint clears the target and the")
print(f"run stops after {back.rows[-1].iter} of the {params.N} budgeted "
      f"iterations")
print()

# ---------------------------------------------------------------- part 2
# Scaling the identity against diag(4, 1, 1): the Frobenius least-squares
# warm start lands at x = 2 with spectral residual max(2, 1) = 2, but the
# spectral optimum is the midpoint x = 2.5 with f* = 1.5.  The method has
# to close that gap itself.
A = np.eye(3)
C = np.diag([4.0, 1.0, 1.0])
prob = make_problem(C, [A])

grid = np.linspace(0.0, 5.0, 50_001)
values = [spectral_norm_exact(x * A - C) for x in grid]
best = int(np.argmin(values))
f_star = values[best]
print("part 2: hand-built 3x3 instance where the warm start is suboptimal")
print(f"grid scan: optimal coefficient x* = {grid[best]:.4f} with "
      f"f* = {f_star:.6f}; the warm start x = 2 has f = 2")

trace2 = solve_regression(
    prob,
    delta=0.1,
    seed=0,
    f_star=f_star,
    early_stop=False,
    trace_path=out_dir / "descent_run.csv",
)
print(f"full-budget run, status {trace2.status!r}:")
print(f"{'iter':>6} {'f_est':>12} {'delta_k':>12}")
for row in trace2.rows:
    print(f"{row.iter:>6} {row.f_est:>12.6f} {row.delta_k:>12.6f}")
print("the relative accuracy falls across checkpoints as the averaged")
print("point moves from the warm start toward the optimal mixture")
