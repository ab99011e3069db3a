"""Head-to-head run of the two gradient-sampling oracles on one task.

Both oracles spend exactly p single-matrix products per call, and the
comparison harness gives them the same data, the same degree p, and the
same per-iteration direction draws.  They differ only in their constants:
the unbiased sampler carries (beta_p, 2/beta_p), which its guarantee is
proved for, while the power-iteration heuristic runs with (1, 2) and
therefore gets a larger iteration budget from the same target.

We disable early stopping so both runs spend their full budgets, then
compare the trajectories checkpoint by checkpoint.  The traces land in
demos/out/ where the report plotter can pick them up.
"""
import pathlib

from relspec import TaskSpec, compare_oracles

out_dir = pathlib.Path(__file__).resolve().parent / "out"
out_dir.mkdir(exist_ok=True)

task = TaskSpec(
    mode="sparse", d=4, n=12, m=18, s=3, delta=0.25, seed=11,
    early_stop=False,
)
results = compare_oracles(
    task,
    out_new=out_dir / "compare_new.csv",
    out_pi=out_dir / "compare_pi.csv",
)

print(f"task: {task.d} sparse 12x18 matrices with {task.s} entries per "
      f"column, target ratio {task.delta}")
print()
print(f"{'oracle':>16} {'p':>4} {'beta':>8} {'L':>8} {'N':>6} "
      f"{'final f_est':>12} {'final ratio':>12} {'matvecs':>9}")
for kind, trace in results.items():
    last = trace.rows[-1]
    print(f"{kind:>16} {trace.meta['p']:>4} {float(trace.meta['beta']):>8.4f} "
          f"{float(trace.meta['L']):>8.4f} {trace.meta['N']:>6} "
          f"{last.f_est:>12.6f} {last.delta_k:>12.3e} {last.matvecs:>9}")

print()
print("trajectories (relative accuracy at shared checkpoints):")
rows_new = {r.iter: r for r in results["new"].rows}
rows_pi = {r.iter: r for r in results["power-iteration"].rows}
shared = sorted(set(rows_new) & set(rows_pi))
print(f"{'iter':>6} {'unbiased':>12} {'power-iter':>12}")
for it in shared:
    print(f"{it:>6} {rows_new[it].delta_k:>12.3e} {rows_pi[it].delta_k:>12.3e}")

print()
print("both end well inside the target; the heuristic pays for its coarser")
print("constants with a longer run, not with worse answers")
