"""Self-checks behind ``bcsph verify`` and the oracles shared with the tests."""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp

from . import hermite
from . import numfield as nf
from . import quad
from . import sphfun as sf
from .rootdata import MultiplicityData, rho_bc

SUITES = ("fast", "full")


# ---------------------------------------------------------------------------
# oracles
# ---------------------------------------------------------------------------


def rank_one_ode(lam: float, xs, m: MultiplicityData, x0: float = 1e-4) -> np.ndarray:
    """Even solution of f'' + (m1 coth x + 2 m2 coth 2x) f' + (lam^2 + rho^2) f = 0, f(0) = 1.

    Started at ``x0`` from the two-term series and integrated with DOP853.
    """
    if m.q != 1:
        raise ValueError("the rank-one oracle needs q = 1")
    mult = m.multiplicities()
    m1, m2 = mult.short, mult.long
    rho = m1 / 2 + m2
    c = lam * lam + rho * rho
    nu = 1 + m1 + m2  # f ~ 1 - c x^2 / (2 nu) near 0

    def rhs(x, y):
        drift = m1 / np.tanh(x) + 2 * m2 / np.tanh(2 * x)
        return [y[1], -drift * y[1] - c * y[0]]

    xs = np.asarray(xs, dtype=np.float64)
    order = np.argsort(xs)
    y0 = [1 - c * x0 * x0 / (2 * nu), -c * x0 / nu]
    sol = solve_ivp(rhs, (x0, float(xs.max())), y0, method="DOP853", t_eval=xs[order], rtol=1e-12, atol=1e-14)
    if not sol.success:
        raise ArithmeticError(f"ODE integration failed: {sol.message}")
    out = np.empty_like(xs)
    out[order] = sol.y[0]
    return out


@dataclass(frozen=True)
class PolynomialCase:
    roots: tuple
    distinct: int

    @property
    def polynomial(self) -> hermite.MonicRealPolynomial:
        return hermite.MonicRealPolynomial.from_roots(self.roots)


def polynomial_suite(count: int = 50, seed: int = 0, max_degree: int = 6) -> list[PolynomialCase]:
    """Integer-root polynomials of degree <= ``max_degree`` with known root multiplicities."""
    rng = np.random.default_rng(seed)
    cases = []
    for _ in range(count):
        deg = int(rng.integers(1, max_degree + 1))
        k = int(rng.integers(1, deg + 1))
        distinct = rng.choice(np.arange(-3, 4), size=k, replace=False)
        # every chosen root appears at least once; the rest are repeats
        roots = list(distinct) + list(rng.choice(distinct, size=deg - k))
        cases.append(PolynomialCase(tuple(int(r) for r in rng.permutation(roots)), k))
    return cases


def random_hermitian(q: int, d: int, gaps: float, rng: np.random.Generator, repeat: bool = True) -> tuple[np.ndarray, int]:
    """Conjugated diagonal with eigenvalue gaps >= ``gaps`` (some repeated); returns (A, distinct count)."""
    k = int(rng.integers(1, q + 1)) if repeat else q
    base = np.cumsum(gaps + rng.uniform(0, 1, size=k)) - 1.5
    ev = np.concatenate([base, rng.choice(base, size=q - k)])
    M = nf.from_real_coords(rng.standard_normal(q * q * d), q, d)
    Q, _ = np.linalg.qr(M)
    return Q @ nf.diag(ev, d) @ nf.adjoint(Q), k


# ---------------------------------------------------------------------------
# checks
# ---------------------------------------------------------------------------


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float


def _gate(est: quad.EstimateWithError, target: complex, cap: float) -> tuple[bool, str]:
    err = abs(est.value - target)
    tol = max(3 * est.stderr, cap)
    return err <= tol, f"|err|={err:.3g} tol={tol:.3g}"


def check_normalization(n: int) -> tuple[bool, str]:
    m = MultiplicityData(2, 2, 5)
    cfg = sf.EvalConfig(n_samples=n, seed=7)
    a = sf.phi_bc(-1j * rho_bc(m), [1.0, 0.4], m, cfg)
    b = sf.psi_bc([0, 0], [1.0, 0.4], m, cfg)
    ok_a, da = _gate(a, 1, 5e-3)
    ok_b, db = _gate(b, 1, 5e-3)
    return ok_a and ok_b, f"trig {da}; rational {db}"


def check_ode(xs=(0.1, 0.5, 1.0, 2.0), lams=(0.5, 1.0, 2.0)) -> tuple[bool, str]:
    m = MultiplicityData(1, 1, 3)
    cfg = sf.EvalConfig(method="deterministic")
    worst = 0.0
    for lam in lams:
        ref = rank_one_ode(lam, xs, m)
        for x, r in zip(xs, ref):
            worst = max(worst, abs(sf.phi_bc([lam], [x], m, cfg).value - r))
    return worst < 1e-6, f"max |diff|={worst:.3g}"


def check_weyl_q1() -> tuple[bool, str]:
    worst = 0.0
    for d, setting in itertools.product((1, 2, 4), ("trig", "rational")):
        m = MultiplicityData(1, d, 3)
        cfg = sf.EvalConfig(setting=setting)
        f = sf.phi_bc if setting == "trig" else sf.psi_bc
        for x in (0.3, 1.1):
            worst = max(worst, abs(f([0.8], [x], m, cfg).value - f([0.8], [-x], m, cfg).value))
    return worst < 1e-10, f"max |f(x)-f(-x)|={worst:.3g}"


def check_type_a_methods(n: int) -> tuple[bool, str]:
    ok, worst = True, 0.0
    for d, setting in itertools.product((1, 2), ("trig", "rational")):
        cfg = sf.EvalConfig(setting=setting, n_samples=n, seed=3)
        det = sf.type_a([1.0, 0.2], [1.0, 0.3], d, cfg.with_(method="deterministic"))
        mc = sf.type_a([1.0, 0.2], [1.0, 0.3], d, cfg.with_(method="montecarlo"))
        z = abs(det.value - mc.value) / mc.stderr
        worst = max(worst, z)
        ok &= z <= 3
    return ok, f"max z={worst:.2f}"


def check_hermite(count: int = 50, matrices: int = 200) -> tuple[bool, str]:
    bad = sum(hermite.distinct_root_count(c.polynomial) != c.distinct for c in polynomial_suite(count))
    rng = np.random.default_rng(11)
    mism = 0
    for _ in range(matrices):
        q = int(rng.integers(1, 5))
        d = int(rng.choice([1, 2]))
        A, k = random_hermitian(q, d, 1e-3, rng)
        if hermite.hankel_eigen_count(A) != k or hermite.distinct_eigen_count(A, d) != k:
            mism += 1
    return bad == 0 and mism == 0, f"polynomial misses={bad}/{count}; matrix mismatches={mism}/{matrices}"


def check_support(n: int, n_witness: int) -> tuple[bool, str]:
    m = MultiplicityData(2, 1, 4)
    rep = sf.support_report([1.5, 0.5], m, "trig", n, seed=5, n_witness=n_witness)
    ok = rep.violation_ok and rep.coverage >= 0.99 and rep.witness_rate == 1.0
    return ok, f"violation={rep.max_violation:.3g} coverage={rep.coverage:.3f} witness={rep.witness_rate}"


def check_limit_q1() -> tuple[bool, str]:
    m = MultiplicityData(1, 1, 3)
    tab = sf.rational_limit_check([1.0], [0.8], m, [0.4, 0.2, 0.1, 0.05], sf.EvalConfig())
    err = tab.errors
    ok = bool(np.all(np.diff(err) < 0))
    return ok, "errors " + ", ".join(f"{e:.3g}" for e in err)


def check_determinism(n: int) -> tuple[bool, str]:
    m = MultiplicityData(2, 1, 4)
    vals = [sf.phi_bc([0.7, 0.1], [1.0, 0.5], m, sf.EvalConfig(n_samples=n, workers=w)) for w in (1, 2, 8)]
    same = all(v.value == vals[0].value and v.stderr == vals[0].stderr for v in vals)
    return same, f"values {[v.value for v in vals][:1]} identical={same}"


def checks(suite: str) -> list[tuple[str, Callable[[], tuple[bool, str]]]]:
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; choose from {SUITES}")
    small = suite == "fast"
    return [
        ("normalization", lambda: check_normalization(20_000 if small else 200_000)),
        ("weyl_q1", check_weyl_q1),
        ("rank_one_ode", check_ode),
        ("type_a_methods", lambda: check_type_a_methods(20_000 if small else 400_000)),
        ("hermite", lambda: check_hermite(50, 100 if small else 1000)),
        ("support", lambda: check_support(20_000 if small else 100_000, 10 if small else 100)),
        ("rational_limit_q1", check_limit_q1),
        ("determinism", lambda: check_determinism(20_000 if small else 100_000)),
    ]


def run_suite(suite: str) -> list[CheckResult]:
    out = []
    for name, fn in checks(suite):
        t0 = time.perf_counter()
        try:
            passed, detail = fn()
        except (ArithmeticError, ValueError) as exc:
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        out.append(CheckResult(name, bool(passed), detail, time.perf_counter() - t0))
    return out


def format_table(results: list[CheckResult]) -> str:
    width = max(len(r.name) for r in results)
    lines = [f"{'check':<{width}}  status  seconds  detail"]
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        lines.append(f"{r.name:<{width}}  {status:<6}  {r.seconds:7.2f}  {r.detail}")
    return "\n".join(lines)

