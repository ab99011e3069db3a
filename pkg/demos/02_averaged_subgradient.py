"""Mechanics of the averaged subgradient method on two tiny problems.

Part 1 runs the recursion by hand on the scalar quadratic f(v) = v^2, where
every number is checkable on paper: with gradient 2v, Lipschitz bound L = 2
and constant step a = 1/4, the prox center halves each iteration while the
averaged output is the weighted mean of the centers it has visited.

Part 2 targets a genuinely nonsmooth objective, f(v) = 1 + ||v||_1 in R^5,
whose minimum value 1 is known.  We ask for relative accuracy 0.1, let the
budget rule size the run, and watch the averaged point beat the target.
"""
import numpy as np

from relspec import (
    GramSystem,
    iteration_budget,
    relative_accuracy,
    sgm_run,
    step_constant_delta,
)

# ---------------------------------------------------------------- part 1
print("part 1: scalar quadratic f(v) = v^2, step a = 1/4, L = 2")
print(f"{'k':>3} {'prox center v_k':>16} {'averaged x_k':>14}")

history = []
gram = GramSystem([[1.0]])
state = sgm_run(
    oracle=lambda v: 2.0 * v,
    gram=gram,
    policy=0.25,
    L=2.0,
    x0=[1.0],
    N=6,
    observer=lambda s: history.append((s.k, s.v[0], s.x[0])),
)
print(f"{0:>3} {1.0:>16.10f} {'-':>14}")
for k, v, x in history:
    print(f"{k:>3} {v:>16.10f} {x:>14.10f}")
print(f"after 3 steps the average is exactly 7/12 = {7/12:.10f}")
print()

# ---------------------------------------------------------------- part 2
n = 5
f_star = 1.0
delta = 0.1
L = float(np.sqrt(n))          # Euclidean Lipschitz constant of ||.||_1
gamma0 = 1.0                   # quadratic growth modulus near the optimum

def f(v):
    return 1.0 + float(np.abs(v).sum())

a = step_constant_delta(delta, L)
N = iteration_budget(delta, gamma0, L)
print(f"part 2: f(v) = 1 + ||v||_1 in R^{n}, target ratio delta = {delta}")
print(f"constant step a = {a:.6f}, budget N = {N}")

gram = GramSystem(np.eye(n))
snapshots = {}

def watch(s):
    if s.k % 100 == 0 or s.k == N:
        snapshots[s.k] = relative_accuracy(f(s.x), f_star)
    return False

state = sgm_run(
    oracle=np.sign,
    gram=gram,
    policy=a,
    L=L,
    x0=np.full(n, 0.4),
    N=N,
    observer=watch,
)

print(f"{'k':>6} {'relative accuracy of x_k':>26}")
for k in sorted(snapshots):
    print(f"{k:>6} {snapshots[k]:>26.6f}")

final = relative_accuracy(f(state.x), f_star)
verdict = "within" if final <= delta else "OUTSIDE"
print(f"final ratio {final:.6f} is {verdict} the requested {delta}")
