"""How good is the randomized power-mean surrogate of the top eigenvalue?

For a fixed PSD matrix we estimate E[(<X^p u, u>)^(1/p)] by Monte Carlo for
growing odd degrees p and compare against the guaranteed sandwich

    beta_p * ||lambda||_p  <=  mean  <=  lambda_max,

where beta_p = p/(p+2) * n^(-1/p).  The bracket tightens toward lambda_max
as p grows, which is exactly why the solver can pick p from the accuracy
target alone.
"""
import numpy as np

from relspec import RngStream, approximation_ratio, estimate_power_mean

rng = np.random.default_rng(7)
n = 12
Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
lam = np.sort(rng.uniform(0.2, 3.0, size=n))
X = (Q * lam) @ Q.T
lam_max = lam[-1]

print(f"matrix: n = {n}, lambda_max = {lam_max:.6f}, ||lambda||_2 gap "
      f"= {lam[-1] - lam[-2]:.3f}")
print()
print(f"{'p':>4} {'beta_p':>9} {'lower bound':>12} {'estimate':>10} "
      f"{'stderr':>9} {'lambda_max':>11}")

stream = RngStream(7, RngStream.ORACLE)
for p in (1, 3, 5, 9, 17, 33):
    mean, stderr = estimate_power_mean(X, n, p, samples=4000, rng=stream)
    beta = approximation_ratio(p, n)
    lower = beta * float(np.sum(lam**p)) ** (1.0 / p)
    print(f"{p:>4} {beta:>9.5f} {lower:>12.6f} {mean:>10.6f} "
          f"{stderr:>9.1e} {lam_max:>11.6f}")

print()
print("the estimate always sits inside the bracket, and both ends close in")
print("on lambda_max as the degree grows")
