"""Spherical functions of type A and BC and their dual Abel measures.

Type A
    ``phi_a`` (trigonometric) and ``psi_a`` (rational) follow the recursion
    over interlacing points.  Sampling the recursion level by level (a
    Gelfand-Tsetlin pattern) produces the dual Abel measure in the unrolled
    coordinates ``H_k = sum(level k) - sum(level k-1)``, and then

        psi_a(lambda, X) = E[exp(i <lambda, H>)],
        phi_a(lambda, X) = E[exp(<i lambda - rho_a, H>)],

    where the level points are drawn through symmetric Dirichlet(d/2)
    simplex coordinates (linear nodes for rational, nodes ``e^{2x}`` for
    trigonometric).  In the trigonometric case ``exp(-<rho_a, H>)`` is the
    product of the per-level importance weights.

Type BC
    ``phi_bc`` and ``psi_bc`` average the type-A functions over the matrix
    ball ``det(I - w* w)^gamma dw``, at the profiles ``X(w)`` (trig, with
    the factor ``|det Z(X, w)|^{-d(p+1)/2+1}``) and ``X'(w)`` (rational).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, field, replace

import numpy as np
from scipy.spatial import cKDTree
from scipy.special import gammaln, jv, spherical_jn

from . import numfield as nf
from . import polytope as pt
from . import quad
from .quad import EstimateWithError, WeightedSample
from .rootdata import MultiplicityData, dominant_bc, rho_a, rho_bc, signed_permutations

STAIRCASE = 1e-7
DEFAULT_NODES = 64
Q1_NODES = 256  # floor for the q = 1 tensor grid; the integrand steepens with x
METHODS = ("auto", "deterministic", "montecarlo")


@dataclass(frozen=True)
class EvalConfig:
    """Evaluation settings shared by all estimators.

    ``method="auto"`` uses quadrature wherever it is implemented (the q = 1
    ball integral and the q = 2 inner type-A integral, in closed Bessel form
    for the rational setting) and Monte Carlo elsewhere;
    ``"deterministic"`` forces Gauss-Jacobi for those integrals.
    ``canonical=True`` evaluates BC functions at the dominant representative
    of X, which makes them exactly W-invariant.  ``antithetic=True`` pairs
    every ball draw w with -w (the ball measure is invariant under w -> -w);
    ``n_samples`` then counts pairs.
    """

    setting: str = "trig"
    n_samples: int = 100_000
    seed: int = 0
    method: str = "auto"
    workers: int = 1
    nodes: int = DEFAULT_NODES
    canonical: bool = False
    antithetic: bool = False

    def __post_init__(self):
        pt.check_setting(self.setting)
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.n_samples < 2:
            raise ValueError("n_samples must be at least 2")
        if self.nodes < 1 or self.workers < 1:
            raise ValueError("nodes and workers must be positive")

    def with_(self, **kw) -> "EvalConfig":
        return replace(self, **kw)


def _lambda(lam, q: int) -> np.ndarray:
    lam = np.atleast_1d(np.asarray(lam, dtype=np.complex128))
    if lam.shape != (q,):
        raise ValueError(f"lambda must have {q} entries, got shape {lam.shape}")
    return lam


def _vector(X) -> np.ndarray:
    X = np.atleast_1d(np.asarray(X, dtype=np.float64))
    if X.ndim != 1 or not np.all(np.isfinite(X)):
        raise ValueError("X must be a finite real vector")
    return X


def staircase(Y: np.ndarray, step: float = STAIRCASE) -> np.ndarray:
    """Separate coalescing coordinates of decreasing rows by a trace-free staircase."""
    q = Y.shape[-1]
    if q < 2:
        return Y
    tight = np.any(Y[..., :-1] - Y[..., 1:] < step, axis=-1)
    if not np.any(tight):
        return Y
    stair = step * ((q - 1) / 2 - np.arange(q))
    return np.where(tight[..., None], Y + stair, Y)


def _shc(z: np.ndarray) -> np.ndarray:
    """sinh(z) / z, continuous at 0."""
    small = np.abs(z) < 1e-6
    safe = np.where(small, 1.0, z)
    return np.where(small, 1.0 + z * z / 6, np.sinh(safe) / safe)


# ---------------------------------------------------------------------------
# type A
# ---------------------------------------------------------------------------


def _type_a_q2(lam: np.ndarray, Y: np.ndarray, d: int, setting: str, nodes: int) -> np.ndarray:
    """Inner q = 2 integral by Gauss-Jacobi at rows ``Y`` (shape (n, 2), decreasing).

    With xi = c + a t the kernel becomes (1 - t^2)^{d/2-1} times a smooth
    factor, which stays valid when the two coordinates coincide.
    """
    t, wq = quad.gauss_jacobi(nodes, d / 2 - 1, d / 2 - 1)
    c = 0.5 * (Y[:, 0] + Y[:, 1])
    a = 0.5 * (Y[:, 0] - Y[:, 1])
    mu = lam[0] - lam[1]
    osc = np.exp(1j * mu * (c[:, None] + a[:, None] * t))
    if setting == "trig":
        smooth = _shc(2 * a)[:, None] ** (1 - d)
        if d != 2:
            at = a[:, None]
            smooth = smooth * (_shc(at * (1 - t)) * _shc(at * (1 + t))) ** (d / 2 - 1)
        osc = osc * smooth
    const = math.exp(gammaln(d) - 2 * gammaln(d / 2)) * 2.0 ** (1 - d)
    return const * np.exp(1j * lam[1] * (Y[:, 0] + Y[:, 1])) * (osc @ wq)


def _bessel_mean(z: np.ndarray, d: int) -> np.ndarray:
    """Mean of exp(i z t) under the density proportional to (1 - t^2)^{d/2-1} on [-1, 1]."""
    if d == 1:
        return jv(0, z)
    if d == 2:
        return np.sinc(z / np.pi)
    small = np.abs(z) < 1e-3
    safe = np.where(small, 1.0, z)
    z2 = z * z
    return np.where(small, 1 - z2 / 10 + z2 * z2 / 280, 3 * spherical_jn(1, safe) / safe)


def _type_a_q2_closed(lam: np.ndarray, Y: np.ndarray, d: int) -> np.ndarray:
    """Rational q = 2 type-A function in closed form."""
    c = 0.5 * (Y[:, 0] + Y[:, 1])
    a = 0.5 * (Y[:, 0] - Y[:, 1])
    mu = lam[0] - lam[1]
    return np.exp(1j * (lam[1] * (Y[:, 0] + Y[:, 1]) + mu * c)) * _bessel_mean(mu * a, d)


def _levels(Y: np.ndarray, d: int, setting: str, rng: np.random.Generator) -> np.ndarray:
    """Unrolled Gelfand-Tsetlin coordinates H for each decreasing row of ``Y``."""
    n, q = Y.shape
    nodes = "linear" if setting == "rational" else "exp"
    H = np.empty((n, q))
    cur = Y
    for k in range(q, 1, -1):
        cur = staircase(cur)
        beta = quad.dirichlet_simplex(d / 2, k, rng, size=n)
        xi = quad.interlacing_from_beta(cur, beta, nodes)
        H[:, k - 1] = cur.sum(axis=-1) - xi.sum(axis=-1)
        cur = xi
    H[:, 0] = cur[:, 0]
    return H


def _level_mass(H: np.ndarray, d: int, setting: str) -> np.ndarray:
    if setting == "rational":
        return np.ones(len(H))
    return np.exp(-H @ rho_a(H.shape[-1], d))


def _type_a_values(lam, Y, d, setting, inner, nodes, rng) -> np.ndarray:
    """Per-row unbiased values of the type-A function at decreasing rows ``Y``."""
    q = Y.shape[-1]
    if q == 1:
        return np.exp(1j * lam[0] * Y[:, 0])
    if inner in ("deterministic", "closed"):
        if q != 2:
            raise ValueError("the deterministic type-A path is implemented for q <= 2 only")
        if inner == "closed" and setting == "rational":
            return _type_a_q2_closed(lam, Y, d)
        return _type_a_q2(lam, Y, d, setting, nodes)
    H = _levels(Y, d, setting, rng)
    return np.exp(1j * (H @ lam)) * _level_mass(H, d, setting)


def _inner_method(q: int, method: str) -> str:
    if method == "auto":
        return "closed" if q <= 2 else "montecarlo"
    if method == "deterministic" and q > 2:
        raise ValueError("deterministic type-A evaluation is implemented for q <= 2 only")
    return method


def _check_type_a(X: np.ndarray, d: int) -> None:
    nf.check_field(d)
    if np.any(np.diff(X) > 0):
        raise ValueError(f"X must be weakly decreasing, got {X.tolist()}")


def type_a(lam, X, d: int, cfg: EvalConfig) -> EstimateWithError:
    """Type-A spherical function in the setting ``cfg.setting``."""
    X = _vector(X)
    q = X.size
    lam = _lambda(lam, q)
    _check_type_a(X, d)
    setting = cfg.setting
    if q == 1:
        return EstimateWithError(complex(np.exp(1j * lam[0] * X[0])), 0.0, 1)
    inner = _inner_method(q, cfg.method)
    if inner in ("deterministic", "closed"):
        val = _type_a_values(lam, X[None, :], d, setting, inner, cfg.nodes, None)[0]
        return EstimateWithError(complex(val), 0.0, cfg.nodes)
    Xs = staircase(X)

    def run(b, size):
        rng = quad.block_rng(cfg.seed, quad.STREAM_LEVELS, b)
        return _type_a_values(lam, np.broadcast_to(Xs, (size, q)), d, setting, inner, cfg.nodes, rng)

    return quad.weighted_mean(np.concatenate(quad.map_blocks(run, cfg.n_samples, cfg.workers)))


def phi_a(lam, X, d: int, cfg: EvalConfig | None = None) -> EstimateWithError:
    """Trigonometric type-A spherical function."""
    return type_a(lam, X, d, (cfg or EvalConfig()).with_(setting="trig"))


def psi_a(lam, X, d: int, cfg: EvalConfig | None = None) -> EstimateWithError:
    """Rational type-A spherical function."""
    return type_a(lam, X, d, (cfg or EvalConfig()).with_(setting="rational"))


def sample_dual_abel_a(X, d: int, setting: str, rng: np.random.Generator, size: int = 1) -> WeightedSample:
    """Draws H from the type-A dual Abel measure at X (unit weights).

    In the trigonometric setting each point carries the importance mass
    exp(-<rho_a, H>); the rational measure is an exact probability measure.
    """
    X = _vector(X)
    _check_type_a(X, d)
    pt.check_setting(setting)
    q = X.size
    if q == 1:
        H = np.broadcast_to(X, (size, 1)).copy()
    else:
        H = _levels(np.broadcast_to(staircase(X), (size, q)), d, setting, rng)
    mass = None if setting == "rational" else _level_mass(H, d, setting)
    return WeightedSample(H, np.ones(size), mass)


# ---------------------------------------------------------------------------
# type BC
# ---------------------------------------------------------------------------


def _profiles(X: np.ndarray, w: np.ndarray, m: MultiplicityData, setting: str):
    """Profiles at the ball points and the trig determinant factor."""
    if setting == "trig":
        prof = nf.singular_log_profile(nf.z_matrix(X, w, m.d), m.d)
        return prof, np.exp(m.det_exponent * prof.sum(axis=-1))
    return nf.hermitian_eigen_desc(nf.hermitian_half(X, w, m.d), m.d), None


class BallEvaluator:
    """BC spherical functions over one fixed, block-seeded set of ball draws.

    Every evaluation reuses the same ball points and the same per-block
    inner random streams, so values at different (lambda, X) use common
    random numbers and finite differences of the estimator are smooth.
    With ``cache=False`` the blocks are regenerated on every pass instead of
    being stored, which bounds memory for very large sample counts.
    """

    def __init__(self, m: MultiplicityData, cfg: EvalConfig, cache: bool = True):
        self.m = m
        self.cfg = cfg
        self.inner = _inner_method(m.q, cfg.method)
        self.sizes = quad.block_sizes(cfg.n_samples)
        self.blocks = None
        if cache:
            self.blocks = quad.map_blocks(self._draw, cfg.n_samples, cfg.workers)

    def _draw(self, b: int, size: int) -> WeightedSample:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", quad.VarianceWarning)
            rng = quad.block_rng(self.cfg.seed, quad.STREAM_BALL, b)
            return quad.ball_sampler(self.m.q, self.m.d, self.m.gamma, rng, size)

    def block(self, b: int) -> WeightedSample:
        return self.blocks[b] if self.blocks is not None else self._draw(b, self.sizes[b])

    @property
    def weights(self) -> np.ndarray:
        return np.concatenate([self.block(b).weights for b in range(len(self.sizes))])

    @property
    def points(self) -> np.ndarray:
        return np.concatenate([self.block(b).points for b in range(len(self.sizes))])

    def _prepare(self, lam, X, setting):
        setting = pt.check_setting(setting or self.cfg.setting)
        X = _vector(X)
        if X.size != self.m.q:
            raise ValueError(f"X must have q={self.m.q} entries")
        if self.cfg.canonical:
            X = dominant_bc(X)
        return _lambda(lam, self.m.q), X, setting

    def _sample_values(self, lam, X, setting, w, rng) -> np.ndarray:
        prof, factor = _profiles(X, w, self.m, setting)
        vals = _type_a_values(lam, prof, self.m.d, setting, self.inner, self.cfg.nodes, rng)
        return vals if factor is None else vals * factor

    def block_values(self, lam, X, setting: str, b: int, sample: WeightedSample | None = None) -> np.ndarray:
        w = (sample or self.block(b)).points
        rng = quad.block_rng(self.cfg.seed, quad.STREAM_LEVELS, b)
        vals = self._sample_values(lam, X, setting, w, rng)
        if self.cfg.antithetic:
            vals = 0.5 * (vals + self._sample_values(lam, X, setting, -w, rng))
        return vals

    def values(self, lam, X, setting: str | None = None) -> np.ndarray:
        """Per-draw values (pair averages when antithetic), aligned with :attr:`weights`."""
        lam, X, setting = self._prepare(lam, X, setting)
        parts = quad.map_blocks(
            lambda b, size: self.block_values(lam, X, setting, b), self.cfg.n_samples, self.cfg.workers
        )
        return np.concatenate(parts)

    def many(self, lam, Xs, setting: str | None = None) -> list[EstimateWithError]:
        """Estimates at several points in one pass over the blocks."""
        prepared = [self._prepare(lam, X, setting) for X in Xs]

        def run(b, size):
            # per-block partial sums keep memory flat; merging in block order is deterministic
            sample = self.block(b)
            out = []
            for lam_, X, setting_ in prepared:
                acc = quad.WeightedAccumulator()
                if np.any(X):
                    acc.add(self.block_values(lam_, X, setting_, b, sample), sample.weights)
                out.append(acc)
            return out

        accs = [quad.WeightedAccumulator() for _ in prepared]
        for part in quad.map_blocks(run, self.cfg.n_samples, self.cfg.workers):
            for acc, other in zip(accs, part):
                acc.merge(other)
        return [
            EstimateWithError(1.0 + 0j, 0.0, self.cfg.n_samples) if not np.any(X) else acc.result()
            for acc, (_, X, _) in zip(accs, prepared)
        ]

    def combination(self, lam, Xs, coeffs, setting: str | None = None) -> EstimateWithError:
        """Estimate of ``sum_i c_i f(X_i)`` with the stderr of the combined per-draw values."""
        prepared = [self._prepare(lam, X, setting) for X in Xs]
        coeffs = np.asarray(coeffs)

        def run(b, size):
            sample = self.block(b)
            g = 0
            for c, (lam_, X, setting_) in zip(coeffs, prepared):
                g = g + c * (self.block_values(lam_, X, setting_, b, sample) if np.any(X) else 1.0)
            acc = quad.WeightedAccumulator()
            acc.add(np.broadcast_to(g, (size,)), sample.weights)
            return acc

        acc = quad.WeightedAccumulator()
        for part in quad.map_blocks(run, self.cfg.n_samples, self.cfg.workers):
            acc.merge(part)
        return acc.result()

    def __call__(self, lam, X, setting: str | None = None) -> EstimateWithError:
        return self.many(lam, [X], setting)[0]


def _phi_bc_q1(lam: complex, x: float, m: MultiplicityData, nodes: int) -> complex:
    """q = 1 trig ball integral: r^2 ~ Beta(d/2, gamma+1) by Gauss-Jacobi, direction by t = cos."""
    d = m.d
    tau, wu = quad.gauss_jacobi(nodes, m.gamma, d / 2 - 1)
    r = np.sqrt((1 + tau) / 2)
    if d == 1:
        t, wt = np.array([-1.0, 1.0]), np.array([0.5, 0.5])
    else:
        t, wt = quad.gauss_jacobi(nodes, (d - 3) / 2, (d - 3) / 2)
        wt = wt / wt.sum()
    c, s = math.cosh(x), math.sinh(x)
    rt = r[:, None] * t[None, :]
    logz = 0.5 * np.log((c + s * rt) ** 2 + s * s * (r[:, None] ** 2 - rt**2))
    F = np.exp((1j * lam + m.det_exponent) * logz)
    return complex(wu @ F @ wt / wu.sum())


def _psi_bc_q1(lam: complex, x: float, m: MultiplicityData, nodes: int) -> complex:
    """q = 1 rational ball integral over the real part of w."""
    a = m.gamma + (m.d - 1) / 2
    t, wq = quad.gauss_jacobi(nodes, a, a)
    return complex(wq @ np.exp(1j * lam * x * t) / wq.sum())


def _bc(lam, X, m: MultiplicityData, cfg: EvalConfig) -> EstimateWithError:
    X = _vector(X)
    if X.size != m.q:
        raise ValueError(f"X must have q={m.q} entries")
    lam = _lambda(lam, m.q)
    if not np.any(X):
        return EstimateWithError(1.0 + 0j, 0.0, 1)
    if m.q == 1 and cfg.method != "montecarlo":
        f = _phi_bc_q1 if cfg.setting == "trig" else _psi_bc_q1
        nodes = max(cfg.nodes, Q1_NODES)
        return EstimateWithError(f(lam[0], float(X[0]), m, nodes), 0.0, nodes)
    return BallEvaluator(m, cfg)(lam, X)


def phi_bc(lam, X, m: MultiplicityData, cfg: EvalConfig | None = None) -> EstimateWithError:
    """Trigonometric BC spherical function via the matrix-ball reduction."""
    return _bc(lam, X, m, (cfg or EvalConfig()).with_(setting="trig"))


def psi_bc(lam, X, m: MultiplicityData, cfg: EvalConfig | None = None) -> EstimateWithError:
    """Rational BC spherical function via the matrix-ball reduction."""
    return _bc(lam, X, m, (cfg or EvalConfig()).with_(setting="rational"))


def sample_dual_abel_bc(
    X,
    m: MultiplicityData,
    setting: str,
    rng: np.random.Generator,
    size: int = 1,
    level_rng: np.random.Generator | None = None,
) -> WeightedSample:
    """Draws H from the BC dual Abel measure at X.

    Weights are the ball importance weights (self-normalised); in the trig
    setting ``mass`` carries the determinant factor and the type-A level
    masses, so the total mass is phi_bc(0, X) rather than 1.  The type-A
    levels draw from ``level_rng`` when given, else from ``rng``.
    """
    X = _vector(X)
    pt.check_setting(setting)
    if X.size != m.q:
        raise ValueError(f"X must have q={m.q} entries")
    if not np.any(X):
        return WeightedSample(np.zeros((size, m.q)), np.ones(size), None)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", quad.VarianceWarning)
        ball = quad.ball_sampler(m.q, m.d, m.gamma, rng, size)
    prof, factor = _profiles(X, ball.points, m, setting)
    if m.q == 1:
        H = prof
    else:
        H = _levels(prof, m.d, setting, rng if level_rng is None else level_rng)
    if setting == "rational":
        return WeightedSample(H, ball.weights, None)
    return WeightedSample(H, ball.weights, factor * _level_mass(H, m.d, setting))


def dual_abel_cloud(X, m: MultiplicityData, setting: str, n: int, seed: int, workers: int = 1) -> WeightedSample:
    """``n`` block-seeded dual Abel draws (identical for any worker count).

    The streams match :class:`BallEvaluator`, so with Monte-Carlo inner
    levels the cloud reproduces the evaluator sample by sample.
    """

    def run(b, size):
        return sample_dual_abel_bc(
            X,
            m,
            setting,
            quad.block_rng(seed, quad.STREAM_BALL, b),
            size,
            quad.block_rng(seed, quad.STREAM_LEVELS, b),
        )

    return WeightedSample.concatenate(quad.map_blocks(run, n, workers))


# ---------------------------------------------------------------------------
# kernels
# ---------------------------------------------------------------------------


@dataclass
class KernelHistogram:
    """Weighted histogram of the dual Abel measure on an axis-aligned grid."""

    edges: list
    mass: np.ndarray
    total: float
    n: int
    outside: float = 0.0

    def __post_init__(self):
        if np.any(self.mass < 0):
            raise ValueError("bin masses must be non-negative")

    @property
    def volume(self) -> float:
        return float(np.prod([e[1] - e[0] for e in self.edges]))

    @property
    def density(self) -> np.ndarray:
        return self.mass / (self.total * self.volume)

    @property
    def centers(self) -> list:
        return [0.5 * (e[1:] + e[:-1]) for e in self.edges]

    def center_grid(self) -> np.ndarray:
        mesh = np.meshgrid(*self.centers, indexing="ij")
        return np.stack([g.ravel() for g in mesh], axis=-1)


def kernel_histogram(X, m: MultiplicityData, setting: str, bins: int, n: int, seed: int, workers: int = 1) -> KernelHistogram:
    """Histogram of the dual Abel measure over the bounding box [-|X|_inf, |X|_inf]^q."""
    X = _vector(X)
    if not np.any(X):
        raise ValueError("the kernel exists only for X != 0")
    if n < 10_000:
        raise ValueError("kernel histograms need n >= 1e4 samples")
    cloud = dual_abel_cloud(X, m, setting, n, seed, workers)
    r = float(np.max(np.abs(X)))
    edges = [np.linspace(-r, r, bins + 1) for _ in range(m.q)]
    mw = cloud.weights if cloud.mass is None else cloud.weights * cloud.mass
    mass, _ = np.histogramdd(cloud.points, bins=edges, weights=mw)
    return KernelHistogram(edges, mass, float(cloud.weights.sum()), n, float(mw.sum() - mass.sum()))


def kernel_pointwise_q1(h, x: float, m: MultiplicityData, setting: str, nodes: int = DEFAULT_NODES) -> np.ndarray:
    """Closed-form q = 1 kernel: density of H = log|cosh x + w sinh x| (trig) or x Re(w) (rational).

    Trigonometric case: the level set of H is the sphere ``|w - P| = R``
    with ``P = -coth(x) e_1`` and ``R = e^h / sinh x``.  Integrating the ball
    density over that sphere (polar angle ``t``) gives

        K(h) = e^{-rho h} R^d |S^{d-2}| / N int_{t0}^{1} (2 R coth(x) (t - t0))^gamma (1 - t^2)^{(d-3)/2} dt,

    ``N`` being the ball normalisation.  For d = 1 the sphere is the two
    points ``P +- R``.
    """
    if m.q != 1:
        raise ValueError("the pointwise kernel is implemented for q = 1")
    pt.check_setting(setting)
    x = abs(float(x))
    if x == 0:
        raise ValueError("the kernel exists only for x != 0")
    h = np.atleast_1d(np.asarray(h, dtype=np.float64))
    d, g = m.d, m.gamma
    inside = np.abs(h) < x
    out = np.zeros_like(h)
    hi = h[inside]
    if setting == "rational":
        a = g + (d - 1) / 2
        log_beta = gammaln(0.5) + gammaln(a + 1) - gammaln(a + 1.5)
        out[inside] = np.exp(a * np.log1p(-((hi / x) ** 2)) - log_beta) / x
        return out
    log_norm = d / 2 * math.log(math.pi) + gammaln(g + 1) - gammaln(g + 1 + d / 2)
    coth = 1 / math.tanh(x)
    R = np.exp(hi) / math.sinh(x)
    if d == 1:
        acc = np.zeros_like(hi)
        for sgn in (-1.0, 1.0):
            w = -coth + sgn * R
            gap = 1 - w * w
            acc += np.where(gap > 0, np.abs(gap) ** g, 0.0)
        sphere = acc
    else:
        t0 = (R * R + coth * coth - 1) / (2 * R * coth)
        tau, wq = quad.gauss_jacobi(nodes, (d - 3) / 2, g)
        half = (1 - t0)[:, None] / 2
        t = t0[:, None] + half * (1 + tau)
        inner = (1 + t) ** ((d - 3) / 2) @ wq
        area = 2 * math.pi ** ((d - 1) / 2) / math.gamma((d - 1) / 2)
        sphere = area * (2 * R * coth) ** g * half[:, 0] ** (g + (d - 1) / 2) * inner
    rho = d * (m.p + 1) / 2 - 1
    out[inside] = np.exp(-rho * hi - log_norm) * R**d * sphere
    return out


# ---------------------------------------------------------------------------
# rational limit
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LimitRow:
    eps: float
    error: float
    stderr: float
    profile_error: float


@dataclass(frozen=True)
class LimitTable:
    rows: tuple

    @property
    def errors(self) -> np.ndarray:
        return np.array([r.error for r in self.rows])

    @property
    def stderrs(self) -> np.ndarray:
        return np.array([r.stderr for r in self.rows])

    @property
    def profile_errors(self) -> np.ndarray:
        return np.array([r.profile_error for r in self.rows])

    def as_records(self) -> list[dict]:
        return [asdict(r) for r in self.rows]


PROFILE_SAMPLES = 4096


def _profile_limit(X: np.ndarray, w: np.ndarray, d: int, eps: float) -> float:
    trig = nf.singular_log_profile(nf.z_matrix(eps * X, w, d), d) / eps
    rat = nf.hermitian_eigen_desc(nf.hermitian_half(X, w, d), d)
    return float(np.max(np.abs(trig - rat)))


def rational_limit_check(lam, X, m: MultiplicityData, eps_list, cfg: EvalConfig | None = None) -> LimitTable:
    """Errors |phi_{lambda/eps}(eps X) - psi_lambda(X)| and profile errors over ``eps_list``.

    Monte-Carlo rows use one set of ball draws for every eps and for psi,
    so each error is estimated from paired per-sample differences.
    """
    cfg = cfg or EvalConfig()
    X = _vector(X)
    lam = _lambda(lam, m.q)
    eps_list = [float(e) for e in eps_list]
    if any(e <= 0 for e in eps_list) or any(b >= a for a, b in zip(eps_list, eps_list[1:])):
        raise ValueError("eps_list must be positive and strictly decreasing")
    rows = []
    if m.q == 1 and cfg.method != "montecarlo":
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", quad.VarianceWarning)
            w = quad.draw_ball(1, m.d, m.gamma, min(cfg.n_samples, PROFILE_SAMPLES), cfg.seed).points
        psi = _psi_bc_q1(lam[0], X[0], m, cfg.nodes)
        for e in eps_list:
            phi = _phi_bc_q1(lam[0] / e, e * X[0], m, cfg.nodes)
            rows.append(LimitRow(e, abs(phi - psi), 0.0, _profile_limit(X, w, m.d, e)))
        return LimitTable(tuple(rows))
    ev = BallEvaluator(m, cfg)
    psi = ev.values(lam, X, "rational")
    w = ev.points[:PROFILE_SAMPLES]
    for e in eps_list:
        phi = ev.values(lam / e, e * X, "trig")
        diff = quad.paired_difference(phi, psi, ev.weights)
        rows.append(LimitRow(e, abs(diff.value), diff.stderr, _profile_limit(X, w, m.d, e)))
    return LimitTable(tuple(rows))


# ---------------------------------------------------------------------------
# support certification
# ---------------------------------------------------------------------------


@dataclass
class SupportReport:
    q: int
    d: int
    p: float
    setting: str
    x: list
    n: int
    seed: int
    max_violation: float
    scale: float
    coverage: float
    coverage_raw: float
    grid_points: int
    witness_rate: float | None
    witness_trials: int
    total_mass: float = field(default=float("nan"))

    def to_dict(self) -> dict:
        return asdict(self)

    @property
    def violation_ok(self) -> bool:
        return self.max_violation <= pt.BOUNDARY_SLACK * self.scale


def interior_grid(X: np.ndarray, per_axis: int) -> tuple[np.ndarray, float]:
    """Regular grid over [-|X|_inf, |X|_inf]^q restricted to the interior of C(X)."""
    r = float(np.max(np.abs(X)))
    axis = np.linspace(-r, r, per_axis)
    mesh = np.meshgrid(*([axis] * X.size), indexing="ij")
    pts = np.stack([g.ravel() for g in mesh], axis=-1)
    return pts[pt.in_C(X, pts, strict=True)], axis[1] - axis[0]


def grid_coverage(H: np.ndarray, pts: np.ndarray, radius: float, symmetric: bool = True) -> float:
    """Fraction of ``pts`` with a sample within sup-norm ``radius``.

    With ``symmetric`` the samples are replaced by their signed-permutation
    orbit.  Signed permutations are sup-norm isometries, so it suffices to
    fold the samples into the dominant chamber and query every orbit image
    of each test point.
    """
    if not len(pts):
        return float("nan")
    if not symmetric:
        dist, _ = cKDTree(H).query(pts, k=1, p=np.inf, distance_upper_bound=radius)
        return float(np.mean(np.isfinite(dist)))
    tree = cKDTree(dominant_bc(H))
    hit = np.zeros(len(pts), dtype=bool)
    for s in signed_permutations(pts.shape[-1]):
        todo = ~hit
        if not todo.any():
            break
        dist, _ = tree.query(s.apply(pts[todo]), k=1, p=np.inf, distance_upper_bound=radius)
        hit[np.flatnonzero(todo)[np.isfinite(dist)]] = True
    return float(hit.mean())


def random_interior_points(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """k points uniform in the interior of C(X), by rejection from the bounding box."""
    r = float(np.max(np.abs(X)))
    out = []
    while sum(len(o) for o in out) < k:
        cand = rng.uniform(-r, r, size=(4 * k, X.size))
        out.append(cand[pt.in_C(X, cand, strict=True)])
    return np.concatenate(out)[:k]


def support_report(
    X,
    m: MultiplicityData,
    setting: str,
    n: int,
    seed: int,
    grid: int = 21,
    n_witness: int = 100,
    workers: int = 1,
) -> SupportReport:
    """Support diagnostics for the dual Abel measure at X.

    * ``max_violation``: worst excess of a sampled H over the C(X) inequalities;
    * ``coverage``: fraction of interior grid points with a sample of the
      signed-permutation orbit of the cloud within two grid pitches (sup
      norm).  The weighted measure is W-invariant, so the orbit is a sample
      of the same measure; ``coverage_raw`` uses the cloud as drawn;
    * ``witness_rate``: success rate of the interior-witness construction on
      random interior points (q >= 2).
    """
    X = _vector(X)
    pt.check_setting(setting)
    if n < 10_000:
        raise ValueError("support reports need n >= 1e4 samples")
    cloud = dual_abel_cloud(X, m, setting, n, seed, workers)
    H = cloud.points
    scale = max(1.0, float(np.max(np.abs(X))))
    violation = float(np.max(pt.bc_violation(X, H)))
    coverage = coverage_raw = float("nan")
    npts = 0
    if np.any(X):
        pts, pitch = interior_grid(X, grid)
        npts = len(pts)
        live = cloud.weights > 0 if cloud.mass is None else (cloud.weights * cloud.mass) > 0
        coverage = grid_coverage(H[live], pts, 2 * pitch)
        coverage_raw = grid_coverage(H[live], pts, 2 * pitch, symmetric=False)
    rate, trials = None, 0
    Xd = dominant_bc(X)
    if m.q >= 2 and np.any(X) and n_witness > 0:
        rng = quad.block_rng(seed, quad.STREAM_AUX, 0)
        ok = 0
        for Hs in random_interior_points(Xd, n_witness, rng):
            try:
                pt.interior_witness(Xd, dominant_bc(Hs), m.d, setting)
                ok += 1
            except (ArithmeticError, ValueError):
                pass
        rate, trials = ok / n_witness, n_witness
    mw = cloud.weights if cloud.mass is None else cloud.weights * cloud.mass
    return SupportReport(
        q=m.q,
        d=m.d,
        p=float(m.p),
        setting=setting,
        x=X.tolist(),
        n=n,
        seed=seed,
        max_violation=violation,
        scale=scale,
        coverage=coverage,
        coverage_raw=coverage_raw,
        grid_points=npts,
        witness_rate=rate,
        witness_trials=trials,
        total_mass=float(mw.sum() / cloud.weights.sum()),
    )
