"""Acceptance gate: one test per top-level criterion, each printing a
single PASS/FAIL line with the criterion's stated tolerances."""
from __future__ import annotations

import math
import time

import numpy as np

from relspec import (
    EvalConfig,
    GramSystem,
    RngStream,
    TaskSpec,
    approximation_ratio,
    compare_oracles,
    estimate_power_mean,
    gen_dense,
    gen_sparse,
    gradient_step,
    operator_apply,
    run_task,
    sample_gradient,
    sample_unit_sphere,
    sample_value,
    select_parameters,
    sgm_run,
    spectral_norm_exact,
    spectral_norm_power,
)


def _report(capfd, idx: int, name: str, failures: list) -> None:
    ok = not failures
    with capfd.disabled():
        tail = "PASS" if ok else "FAIL — " + "; ".join(str(f) for f in failures[:3])
        print(f"[acceptance {idx:02d}] {name}: {tail}")
    assert ok, f"{name}: {failures[:5]}"


def _random_psd(gen: np.random.Generator, n: int, lo=0.0, hi=3.0) -> np.ndarray:
    Q, _ = np.linalg.qr(gen.standard_normal((n, n)))
    lam = gen.uniform(lo, hi, size=n)
    return (Q * lam) @ Q.T


# ---------------------------------------------------------------------------

def test_criterion_01_parameter_table(capfd):
    failures = []
    expected = {100: (663, 4_000_269), 200: (733, 8_000_577),
                500: (825, 20_001_419), 1000: (895, 40_002_992)}
    select_parameters(0.01, 100)  # warm imports and caches
    for n, (p_want, N_want) in expected.items():
        t0 = time.perf_counter()
        rp = select_parameters(0.01, n)
        dt = time.perf_counter() - t0
        if (rp.p, rp.N) != (p_want, N_want):
            failures.append(f"n={n}: got (p,N)=({rp.p},{rp.N}), want ({p_want},{N_want})")
        if dt >= 1e-3:
            failures.append(f"n={n}: runtime {dt * 1e3:.3f} ms >= 1 ms")
    _report(capfd, 1, "parameter-table reproduction", failures)


def test_criterion_02_per_sample_identities(capfd):
    failures = []
    gen = np.random.default_rng(202)
    rng = RngStream(202, RngStream.ORACLE)
    degrees = (1, 3, 5, 9)
    for trial in range(2500):
        n = int(gen.integers(2, 21))
        X = _random_psd(gen, n)
        lam_max = float(np.linalg.eigvalsh(X)[-1])
        u = sample_unit_sphere(rng, n)
        values = []
        for p in degrees:
            val = sample_value(X, u, p)
            g = sample_gradient(X, u, p)
            contraction = g.scale * float(g.direction @ X @ g.direction)
            if abs(contraction - val) > 1e-10 * max(1.0, abs(val)):
                failures.append(f"trial {trial} p={p}: <grad,X>={contraction} vs {val}")
            nuclear = g.scale * float(g.direction @ g.direction)
            if nuclear > 1.0 + 1e-10:
                failures.append(f"trial {trial} p={p}: nuclear norm {nuclear} > 1")
            values.append(val)
        for lo, hi in zip(values, values[1:]):
            if lo > hi * (1.0 + 1e-12) + 1e-15:
                failures.append(f"trial {trial}: value not monotone ({lo} > {hi})")
        if values[-1] > lam_max * (1.0 + 1e-12):
            failures.append(f"trial {trial}: value {values[-1]} above lam_max {lam_max}")
        if failures:
            break
    _report(capfd, 2, "per-sample exact identities (10^4 triples)", failures)


def _ep_diag2(l1: float, l2: float, p: int, points: int = 100_001) -> float:
    theta = np.linspace(0.0, 2.0 * np.pi, points)
    c2 = np.cos(theta) ** 2
    integrand = (l1**p * c2 + l2**p * (1.0 - c2)) ** (1.0 / p)
    return float(np.trapezoid(integrand, theta) / (2.0 * np.pi))


def test_criterion_03_unbiasedness(capfd):
    failures = []
    X = np.diag([3.0, 1.0])
    h = 1e-5
    samples = 100_000
    for p in (3, 5):
        # reference gradient of the quadrature-evaluated mean, by central
        # differences in the three independent symmetric coordinates
        g00 = (_ep_diag2(3.0 + h, 1.0, p) - _ep_diag2(3.0 - h, 1.0, p)) / (2 * h)
        g11 = (_ep_diag2(3.0, 1.0 + h, p) - _ep_diag2(3.0, 1.0 - h, p)) / (2 * h)

        def ep_offdiag(t: float) -> float:
            half_gap = math.sqrt(1.0 + t * t)
            return _ep_diag2(2.0 + half_gap, 2.0 - half_gap, p)

        g01 = (ep_offdiag(h) - ep_offdiag(-h)) / (2 * h) / 2.0  # per-entry

        rng = RngStream(300 + p, RngStream.ORACLE)
        acc = np.zeros((samples, 3))
        for i in range(samples):
            u = sample_unit_sphere(rng, 2)
            g = sample_gradient(X, u, p)
            G = g.scale * np.outer(g.direction, g.direction)
            acc[i] = (G[0, 0], G[1, 1], G[0, 1])
        mean = acc.mean(axis=0)
        se = acc.std(axis=0, ddof=1) / math.sqrt(samples)
        for label, m_hat, ref, s in zip(
            ("G00", "G11", "G01"), mean, (g00, g11, g01), se
        ):
            if abs(m_hat - ref) > 5.0 * s:
                failures.append(
                    f"p={p} {label}: mean {m_hat:.6f} vs fd {ref:.6f} ({abs(m_hat - ref) / s:.1f} se)"
                )
    _report(capfd, 3, "unbiasedness vs quadrature finite differences", failures)


def test_criterion_04_sandwich_bounds(capfd):
    failures = []
    gen = np.random.default_rng(404)
    rng = RngStream(404, RngStream.ORACLE)
    for trial in range(50):
        p = int(gen.choice([3, 5, 7, 9]))
        if trial % 2 == 0:
            n = int(gen.integers(2, 9))
            X = _random_psd(gen, n, lo=0.1, hi=2.0)
            lam = np.linalg.eigvalsh(X)
            apply_x, dim = X, n
        else:
            n = int(gen.integers(2, 9))
            m = int(gen.integers(n, 13))
            Y = gen.standard_normal((n, m)) / math.sqrt(m)
            lam = np.linalg.svd(Y, compute_uv=False) ** 2
            apply_x, dim = (lambda v, Y=Y: Y @ (Y.T @ v)), n
        mean, stderr = estimate_power_mean(apply_x, dim, p, samples=2000, rng=rng)
        lower = approximation_ratio(p, n) * float(np.sum(lam**p)) ** (1.0 / p)
        upper = float(np.max(lam))
        if mean < lower - 4.0 * stderr:
            failures.append(f"trial {trial}: mean {mean} below beta_p bound {lower}")
        if mean > upper + 4.0 * stderr:
            failures.append(f"trial {trial}: mean {mean} above lam_max {upper}")
    _report(capfd, 4, "sandwich bounds (mean vs beta_p and lam_max)", failures)


def test_criterion_05_stability_equivalence(capfd):
    failures = []
    gen = np.random.default_rng(505)
    rng = RngStream(505, RngStream.ORACLE)
    for trial in range(100):
        n = int(gen.integers(2, 11))
        Q, _ = np.linalg.qr(gen.standard_normal((n, n)))
        lam = gen.uniform(1.0, 10.0, size=n)  # condition number <= 10
        X = (Q * lam) @ Q.T
        p = int(gen.choice([1, 3, 5, 7, 9]))
        k = (p - 1) // 2
        u = sample_unit_sphere(rng, n)

        w = u.copy()
        for _ in range(k):
            w = X @ w
        y = w / np.linalg.norm(w)
        xp_u = u.copy()
        for _ in range(p):
            xp_u = X @ xp_u
        f_naive = float(u @ xp_u) ** (1.0 / p)
        rayleigh = float(y @ X @ y)
        G_naive = (f_naive / rayleigh) * np.outer(y, y) if k > 0 else np.outer(u, u)

        val = sample_value(X, u, p)
        G = sample_gradient(X, u, p).to_dense()
        if abs(val - f_naive) > 1e-8 * abs(f_naive):
            failures.append(f"trial {trial}: value {val} vs naive {f_naive}")
        err = np.linalg.norm(G - G_naive) / np.linalg.norm(G_naive)
        if err > 1e-8:
            failures.append(f"trial {trial}: gradient mismatch rel {err:.2e}")
    _report(capfd, 5, "stable chain equals naive powers (cond <= 10)", failures)


def test_criterion_06_solver_hand_trace(capfd):
    failures = []
    gram = GramSystem(np.array([[1.0]]))
    seen_v = []
    final = sgm_run(
        oracle=lambda v: 2.0 * v,
        gram=gram,
        policy=0.25,
        L=2.0,
        x0=np.array([1.0]),
        N=3,
        observer=lambda s: seen_v.append(float(s.v[0])),
    )
    vs = [1.0] + seen_v
    if vs != [1.0, 0.5, 0.25, 0.125]:
        failures.append(f"prox centers {vs} != [1.0, 0.5, 0.25, 0.125]")
    if abs(float(final.x[0]) - 7.0 / 12.0) > 1e-13:
        failures.append(f"x_3 = {float(final.x[0])} != 7/12")
    s = gradient_step(GramSystem(np.diag([2.0, 0.0])), np.zeros(2), np.array([4.0, 0.0]))
    if not np.allclose(s, [-2.0, 0.0], atol=1e-12):
        failures.append(f"min-norm step {s} != (-2, 0)")
    _report(capfd, 6, "solver hand trace and min-norm step", failures)


def test_criterion_07_end_to_end_accuracy(capfd):
    failures = []
    stop_iters = []
    N = None
    for seed in range(5):
        task = TaskSpec(mode="dense", d=10, n=40, m=80, delta=0.05, seed=seed)
        trace = run_task(task)
        N = int(trace.meta["N"])
        last = trace.rows[-1]
        if last.delta_k > 0.05:
            failures.append(f"seed {seed}: final delta_k {last.delta_k} > 0.05")
        if last.iter > N:
            failures.append(f"seed {seed}: stopped at {last.iter} > N={N}")
        stop_iters.append(last.iter)
    mean_stop = sum(stop_iters) / len(stop_iters)
    if mean_stop > N / 10.0:
        failures.append(f"mean stop iteration {mean_stop} > N/10 = {N / 10.0}")
    _report(capfd, 7, "end-to-end relative accuracy (5 seeds)", failures)


def test_criterion_08_known_optimum_data(capfd):
    failures = []
    shapes = [("dense", 2, 4, 4, 0), ("dense", 3, 5, 8, 0), ("sparse", 2, 6, 6, 3),
              ("sparse", 3, 7, 9, 2), ("dense", 1, 2, 3, 0)]
    for seed in range(20):
        mode, d, n, m, s = shapes[seed % len(shapes)]
        prob = (gen_dense(d, n, m, seed=seed) if mode == "dense"
                else gen_sparse(d, n, m, s=s, seed=seed))
        if spectral_norm_exact(prob.C) != 1.0:
            failures.append(f"seed {seed}: |C| = {spectral_norm_exact(prob.C)} != 1")
        for i, A in enumerate(prob.basis):
            if np.asarray(A.toarray() if hasattr(A, "toarray") else A)[0, 0] != 0.0:
                failures.append(f"seed {seed}: basis {i} corner entry nonzero")
        f0 = spectral_norm_exact(operator_apply(prob, np.zeros(prob.d)) - prob.C)
        if abs(f0 - 1.0) > 1e-12:
            failures.append(f"seed {seed}: f(0) = {f0}")
    _report(capfd, 8, "known-optimum data invariants (20 seeds)", failures)


def test_criterion_09_oracle_comparison(capfd):
    failures = []
    task = TaskSpec(
        mode="dense", d=10, n=40, m=80, delta=0.05, seed=0, early_stop=False
    )
    res = compare_oracles(task)
    dn = res["new"].rows[-1].delta_k
    dp = res["power-iteration"].rows[-1].delta_k
    if dn > task.delta or dp > task.delta:
        failures.append(f"a run missed the target: new {dn}, power-iteration {dp}")
    # the two finals must agree within 2x, except below delta/10 where both
    # sit past the experiment's resolution and count as coinciding
    if dp > max(2.0 * dn, task.delta / 10.0):
        failures.append(
            f"power-iteration final {dp} not within 2x of new-oracle final {dn}"
        )
    _report(capfd, 9, "oracle comparison within 2x (full budget)", failures)


def test_criterion_10_power_vs_exact(capfd):
    failures = []
    gen = np.random.default_rng(1010)
    for trial in range(100):
        n = int(gen.integers(2, 65))
        m = int(gen.integers(2, 129))
        Y = gen.standard_normal((n, m))
        exact = spectral_norm_exact(Y)
        est = spectral_norm_power(Y, EvalConfig(seed=trial))
        rel = abs(est.value - exact) / exact
        if rel > 1e-6:
            failures.append(f"trial {trial} ({n}x{m}): rel error {rel:.2e}")
    _report(capfd, 10, "power vs exact evaluator (100 matrices)", failures)
