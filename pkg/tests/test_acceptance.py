"""The ten acceptance criteria at their stated sizes and tolerances.

Each test prints one PASS/FAIL line; the lines are repeated in the terminal
summary.  Criterion 8 draws 2^23 antithetic ball pairs and takes about a
minute and a half on one core.
"""

import hashlib
import itertools
import math
import time

import numpy as np
import pytest
from scipy.integrate import quad as integrate

from bcspherical import hermite
from bcspherical import quad
from bcspherical import rootdata as rd
from bcspherical import sphfun as sf
from bcspherical.rootdata import MultiplicityData
from bcspherical.verify import polynomial_suite, random_hermitian, rank_one_ode

WORKERS = (1, 2, 8)


def z(a, b):
    return abs(a.value - b.value) / math.hypot(a.stderr, b.stderr)


def test_01_normalization(report):
    m = MultiplicityData(2, 2, 5)
    X = [1.0, 0.4]
    cfg = sf.EvalConfig(n_samples=200_000, seed=7)
    lines = []
    ok = True
    for name, fn, lam in (("trig", sf.phi_bc, -1j * rd.rho_bc(m)), ("rational", sf.psi_bc, [0.0, 0.0])):
        t0 = time.perf_counter()
        est = fn(lam, X, m, cfg)
        secs = time.perf_counter() - t0
        err = abs(est.value - 1)
        tol = max(3 * est.stderr, 5e-3)
        ok &= err <= tol and secs < 60
        lines.append(f"{name} |v-1|={err:.2e} (tol {tol:.1e}, {secs:.1f}s)")
    assert report("1 normalization", ok, "; ".join(lines))


def test_02_weyl_invariance(report):
    worst_q1 = 0.0
    for d, p in ((1, 3), (2, 4), (4, 3)):
        m = MultiplicityData(1, d, p)
        for setting, fn in (("trig", sf.phi_bc), ("rational", sf.psi_bc)):
            cfg = sf.EvalConfig(setting=setting)
            for x in (0.3, 0.9, 1.7):
                worst_q1 = max(worst_q1, abs(fn([1.3], [x], m, cfg).value - fn([1.3], [-x], m, cfg).value))
    m = MultiplicityData(2, 1, 4)
    X = np.array([1.0, 0.4])
    lam = [0.7, 0.2]
    worst_z = 0.0
    for setting in ("trig", "rational"):
        ev = sf.BallEvaluator(m, sf.EvalConfig(setting=setting, n_samples=100_000, seed=3))
        ests = ev.many(lam, [s.apply(X) for s in rd.signed_permutations(2)])
        worst_z = max(worst_z, max(z(ests[0], e) for e in ests[1:]))
    ok = worst_q1 < 1e-10 and worst_z < 3
    assert report("2 Weyl invariance", ok, f"q=1 max |f(x)-f(-x)|={worst_q1:.1e}; q=2 max z={worst_z:.2f} over 8 elements")


def test_03_rank_one_ode(report):
    m = MultiplicityData(1, 1, 3)
    xs = np.array([0.1, 0.5, 1.0, 2.0])
    cfg = sf.EvalConfig(method="deterministic")
    t0 = time.perf_counter()
    worst = 0.0
    for lam in (0.5, 1.0, 2.0):
        ref = rank_one_ode(lam, xs, m)
        got = np.array([sf.phi_bc([lam], [x], m, cfg).value for x in xs])
        worst = max(worst, float(np.max(np.abs(got - ref))))
    secs = time.perf_counter() - t0
    assert report("3 rank-one ODE", worst < 1e-6 and secs < 5, f"max |diff|={worst:.1e} ({secs:.2f}s)")


def test_04_inner_method_cross_validation(report):
    rng = np.random.default_rng(2024)
    zs, zs_paired = [], []
    for k in range(12):
        d = (1, 2)[k % 2]
        setting = ("trig", "rational")[(k // 2) % 2]
        m = MultiplicityData(2, d, float(rng.uniform(3.2, 6.0)))
        lam = rng.uniform(-2, 2, 2)
        X = np.sort(rng.uniform(0.1, 1.8, 2))[::-1]
        cfg = sf.EvalConfig(setting=setting, n_samples=100_000, seed=k)
        det = sf.BallEvaluator(m, cfg.with_(method="deterministic"))
        mc = sf.BallEvaluator(m, cfg.with_(method="montecarlo"))
        zs.append(z(det(lam, X), mc(lam, X)))
        # common ball draws: the paired difference isolates the inner integral
        diff = quad.paired_difference(det.values(lam, X), mc.values(lam, X), det.weights)
        zs_paired.append(abs(diff.value) / diff.stderr)
    ok = max(zs) < 3 and max(zs_paired) < 3
    assert report("4 inner-method cross-validation", ok, f"12 configs; max z={max(zs):.2f}, max paired z={max(zs_paired):.2f}")


def test_05_support(report):
    t0 = time.perf_counter()
    lines, ok = [], True
    for X, m, n, cov in (([1.5, 0.5], MultiplicityData(2, 1, 4), 100_000, 0.99),
                          ([1.5, 1.0, 0.5], MultiplicityData(3, 1, 7), 200_000, 0.95)):
        for setting in ("trig", "rational"):
            rep = sf.support_report(X, m, setting, n, seed=0, n_witness=100)
            good = rep.violation_ok and rep.coverage >= cov and rep.witness_rate == 1.0
            ok &= good
            lines.append(
                f"q={m.q} {setting}: viol={rep.max_violation:.2g} cov={rep.coverage:.3f} "
                f"(raw {rep.coverage_raw:.3f}) witness={rep.witness_rate:.2f}"
            )
    secs = time.perf_counter() - t0
    ok &= secs < 180
    assert report("5 support", ok, "; ".join(lines) + f" ({secs:.0f}s)")


def _bin_average(edges, x, m, setting):
    out = []
    for a, b in zip(edges[:-1], edges[1:]):
        val = integrate(lambda h: sf.kernel_pointwise_q1(h, x, m, setting)[0], a, b, epsabs=1e-12)[0]
        out.append(val / (b - a))
    return np.array(out)


def test_06_kernel_oracle(report):
    lines, ok = [], True
    for d, p, x in ((1, 3, 1.0), (2, 2, 0.8)):
        m = MultiplicityData(1, d, p)
        for setting in ("trig", "rational"):
            hist = sf.kernel_histogram([x], m, setting, 64, 1_000_000, seed=0)
            edges = hist.edges[0]
            width = edges[1] - edges[0]
            centers = hist.centers[0]
            ref = _bin_average(edges, x, m, setting)
            inner = np.abs(centers) <= x - 2 * width
            rel = float(np.max(np.abs(hist.density[inner] - ref[inner]) / ref[inner]))
            ok &= rel < 0.05
            lines.append(f"d={d} p={p} {setting}: {rel:.2%}")
    assert report("6 kernel oracle", ok, "sup rel err " + ", ".join(lines))


def test_07_rational_limit(report):
    eps = [0.4, 0.2, 0.1, 0.05]
    lines, ok = [], True
    m = MultiplicityData(1, 1, 3)
    tab = sf.rational_limit_check([1.0], [0.8], m, eps)
    ratios = tab.profile_errors[:-1] / tab.profile_errors[1:]
    good = bool(np.all(np.diff(tab.errors) < 0) and np.all((ratios >= 1.5) & (ratios <= 2.5)))
    ok &= good
    lines.append("q=1 errors " + ",".join(f"{e:.2e}" for e in tab.errors) + " ratios " + ",".join(f"{r:.2f}" for r in ratios))
    m = MultiplicityData(2, 1, 4)
    tab = sf.rational_limit_check([1.0, 0.3], [0.9, 0.3], m, eps, sf.EvalConfig(n_samples=200_000, seed=1))
    err, se = tab.errors, tab.stderrs
    ratios = tab.profile_errors[:-1] / tab.profile_errors[1:]
    gated = all(err[k + 1] < err[k] + 3 * math.hypot(se[k], se[k + 1]) for k in range(len(eps) - 1))
    good = gated and bool(np.all((ratios >= 1.5) & (ratios <= 2.5)))
    ok &= good
    lines.append("q=2 errors " + ",".join(f"{e:.2e}" for e in err) + " ratios " + ",".join(f"{r:.2f}" for r in ratios))
    assert report("7 rational limit", ok, "; ".join(lines))


def test_08_rational_eigen_equation(report):
    m = MultiplicityData(2, 2, 4)
    lam = np.array([1.0, 0.3])
    X = np.array([0.9, 0.4])
    points, coeffs = rd.stencil(rd.dunkl_laplacian_invariant, X, m)
    coeffs = np.array(coeffs, dtype=np.float64)
    centre = [k for k, P in enumerate(points) if np.array_equal(P, X)]
    assert len(centre) == 1
    coeffs[centre[0]] += lam @ lam
    cfg = sf.EvalConfig(setting="rational", n_samples=2**23, seed=8, antithetic=True)
    t0 = time.perf_counter()
    res = sf.BallEvaluator(m, cfg, cache=False).combination(lam, points, coeffs)
    secs = time.perf_counter() - t0
    ok = abs(res.value) < 1e-3
    assert report("8 rational eigen-equation", ok, f"|residual|={abs(res.value):.2e} (stderr {res.stderr:.1e}, {secs:.0f}s)")


def test_09_hermite(report):
    cases = polynomial_suite(50, seed=0, max_degree=6)
    poly_ok = sum(hermite.distinct_root_count(c.polynomial) == c.distinct for c in cases)
    rng = np.random.default_rng(11)
    agree = 0
    for _ in range(1000):
        q = int(rng.integers(1, 5))
        d = int(rng.choice([1, 2]))
        A, k = random_hermitian(q, d, 1e-3, rng)
        agree += hermite.hankel_eigen_count(A) == hermite.distinct_eigen_count(A, d) == k
    ok = poly_ok == 50 and agree == 1000
    assert report("9 hermite", ok, f"polynomials {poly_ok}/50; Hankel vs clustering {agree}/1000")


def _digest(*arrays):
    h = hashlib.sha256()
    for a in arrays:
        h.update(np.ascontiguousarray(a).tobytes())
    return h.hexdigest()[:16]


def test_10_determinism(report):
    m2 = MultiplicityData(2, 2, 5)
    runs = {
        "normalization": lambda w: _digest(*[
            [e.value, e.stderr] for e in (
                sf.phi_bc(-1j * rd.rho_bc(m2), [1.0, 0.4], m2, sf.EvalConfig(n_samples=200_000, seed=7, workers=w)),
                sf.psi_bc([0, 0], [1.0, 0.4], m2, sf.EvalConfig(n_samples=200_000, seed=7, workers=w)),
            )
        ]),
        "cloud q=3": lambda w: _digest(
            *(lambda c: (c.points, c.weights, c.mass))(
                sf.dual_abel_cloud([1.5, 1.0, 0.5], MultiplicityData(3, 1, 7), "trig", 200_000, 0, w)
            )
        ),
        "kernel": lambda w: _digest(sf.kernel_histogram([1.0], MultiplicityData(1, 1, 3), "trig", 64, 1_000_000, 0, w).mass),
        "limit q=2": lambda w: _digest(np.array([
            [r.error, r.stderr] for r in sf.rational_limit_check(
                [1.0, 0.3], [0.9, 0.3], MultiplicityData(2, 1, 4), [0.4, 0.2, 0.1, 0.05],
                sf.EvalConfig(n_samples=200_000, seed=1, workers=w)).rows
        ])),
        "eigen combination": lambda w: _digest(np.array([
            (lambda e: [e.value, e.stderr])(
                sf.BallEvaluator(
                    MultiplicityData(2, 2, 4),
                    sf.EvalConfig(setting="rational", n_samples=2**18, seed=8, antithetic=True, workers=w),
                    cache=False,
                ).combination([1.0, 0.3], [np.array([0.9, 0.4]), np.array([0.91, 0.4])], [1.0, -1.0])
            )
        ])),
    }
    lines, ok = [], True
    for name, fn in runs.items():
        digests = [fn(w) for w in WORKERS]
        same = len(set(digests)) == 1
        ok &= same
        lines.append(f"{name} {'identical' if same else 'DIFFERS'}")
    assert report("10 determinism", ok, f"workers {WORKERS}: " + ", ".join(lines))
