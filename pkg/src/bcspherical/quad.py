"""Sampling and quadrature engines.

Random streams are keyed by ``(seed, stream, block)``: a run of ``n`` samples
is cut into fixed-size blocks, each block draws from its own Philox
generator, and blocks are reassembled in order.  Results are therefore
bit-identical for any number of worker threads.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy.special import roots_jacobi

from . import numfield as nf

BLOCK_SIZE = 8192

STREAM_BALL = 0
STREAM_LEVELS = 1
STREAM_AUX = 2

INTERLACING_TOL = 1e-8


class VarianceWarning(RuntimeWarning):
    """Importance weights with unbounded variance."""


@dataclass
class WeightedSample:
    """A batch of sample points with non-negative weights.

    ``weights`` are self-normalised by every estimator.  ``mass`` is an
    optional per-point multiplier that is not normalised, so
    ``sum(weights * mass * f) / sum(weights)`` integrates ``f`` against a
    measure of total mass ``mean(mass)`` (weighted).
    """

    points: np.ndarray
    weights: np.ndarray
    mass: np.ndarray | None = None

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        if w.ndim != 1 or len(w) != len(self.points):
            raise ValueError("one weight per sample point is required")
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise ValueError("weights must be finite and non-negative")
        self.weights = w
        if self.mass is not None:
            mass = np.asarray(self.mass, dtype=np.float64)
            if mass.shape != w.shape or not np.all(np.isfinite(mass)) or np.any(mass < 0):
                raise ValueError("mass must be finite, non-negative and one per point")
            self.mass = mass

    @classmethod
    def concatenate(cls, parts: Sequence["WeightedSample"]) -> "WeightedSample":
        mass = None
        if any(p.mass is not None for p in parts):
            mass = np.concatenate([np.ones(len(p)) if p.mass is None else p.mass for p in parts])
        return cls(
            np.concatenate([p.points for p in parts]),
            np.concatenate([p.weights for p in parts]),
            mass,
        )

    def __len__(self) -> int:
        return len(self.weights)


@dataclass(frozen=True)
class EstimateWithError:
    value: complex
    stderr: float
    n: int

    def __post_init__(self):
        if self.stderr < 0 or self.n < 1:
            raise ValueError("stderr must be >= 0 and n >= 1")

    @property
    def real(self) -> float:
        return float(np.real(self.value))

    def __sub__(self, other: "EstimateWithError") -> "EstimateWithError":
        """Difference of independent estimates (stderrs add in quadrature)."""
        return EstimateWithError(
            self.value - other.value, math.hypot(self.stderr, other.stderr), min(self.n, other.n)
        )

    def within(self, target: complex, k: float = 3.0, floor: float = 0.0) -> bool:
        """|value - target| <= max(k * stderr, floor)."""
        return abs(self.value - target) <= max(k * self.stderr, floor)


# ---------------------------------------------------------------------------
# block-parallel randomness
# ---------------------------------------------------------------------------


def block_rng(seed: int, stream: int, block: int) -> np.random.Generator:
    ss = np.random.SeedSequence([int(seed), int(stream), int(block)])
    return np.random.Generator(np.random.Philox(ss))


def block_sizes(n: int, block_size: int = BLOCK_SIZE) -> list[int]:
    full, rest = divmod(int(n), block_size)
    return [block_size] * full + ([rest] if rest else [])


def map_blocks(fn: Callable[[int, int], object], n: int, workers: int = 1) -> list:
    """Evaluate ``fn(block_index, block_len)`` over all blocks, in block order."""
    sizes = block_sizes(n)
    if workers <= 1 or len(sizes) <= 1:
        return [fn(b, s) for b, s in enumerate(sizes)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(len(sizes)), sizes))


# ---------------------------------------------------------------------------
# simplex and interlacing
# ---------------------------------------------------------------------------


def dirichlet_simplex(alpha: float, q: int, rng: np.random.Generator, size=None) -> np.ndarray:
    """Symmetric Dirichlet(alpha) draws on the open simplex via normalised Gammas."""
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    shape = (q,) if size is None else (size, q)
    g = rng.standard_gamma(alpha, size=shape)
    return g / g.sum(axis=-1, keepdims=True)


NODE_MAPS = ("linear", "exp")
BISECTION_STEPS = 64


def _node_map(nodes: str):
    if nodes not in NODE_MAPS:
        raise ValueError(f"nodes must be one of {NODE_MAPS}, got {nodes!r}")
    return (lambda t: t) if nodes == "linear" else np.sinh


def beta_from_interlacing(x, xi, nodes: str = "linear") -> np.ndarray:
    """beta_k = prod_i (xi_i - x_k) / prod_{i != k} (x_i - x_k).

    With ``nodes="exp"`` the map is applied to the exponentiated points
    ``e^{2 x}``, ``e^{2 xi}``, evaluated through differences of the log
    coordinates so that close nodes keep full relative precision.
    """
    phi = _node_map(nodes)
    x = np.asarray(x, dtype=np.float64)
    xi = np.asarray(xi, dtype=np.float64)
    q = x.shape[-1]
    num = np.prod(phi(xi[..., None, :] - x[..., :, None]), axis=-1)
    diff = phi(x[..., None, :] - x[..., :, None])
    idx = np.arange(q)
    diff[..., idx, idx] = 1.0
    beta = num / np.prod(diff, axis=-1)
    if nodes == "exp":
        # e^{2a} - e^{2b} = 2 e^{a + b} sinh(a - b); the powers of 2 cancel
        beta = beta * np.exp(xi.sum(axis=-1)[..., None] - (x.sum(axis=-1)[..., None] - x))
    return beta


def interlacing_from_beta(x, beta, nodes: str = "linear", check: bool = True) -> np.ndarray:
    """Interlacing points x_{k+1} < xi_k < x_k whose simplex coordinates are ``beta``.

    The ``xi`` are the roots of ``sum_k beta_k prod_{i != k} (t - x_i)``. On
    each gap that polynomial divided by ``prod (t - x_i)`` is the strictly
    decreasing secular function ``sum_k beta_k / (t - x_k)``, so every root
    is bracketed and found by bisection in coordinates relative to the
    lower node.  ``nodes="exp"`` uses the nodes ``e^{2 x}`` and returns
    ``xi`` in log coordinates.
    """
    phi = _node_map(nodes)
    x = np.asarray(x, dtype=np.float64)
    beta = np.asarray(beta, dtype=np.float64)
    q = x.shape[-1]
    if beta.shape[-1] != q:
        raise ValueError("x and beta must have the same length")
    x, beta = np.broadcast_arrays(x, beta)
    if q == 1:
        return np.zeros(x.shape[:-1] + (0,))
    gap = x[..., :-1] - x[..., 1:]
    if np.any(gap <= 0):
        raise ValueError("nodes x must be strictly decreasing")
    c = beta if nodes == "linear" else beta * np.exp(x[..., :1] - x)
    # offsets of every node from each lower bracket end: shape (..., q-1, q)
    base = x[..., 1:, None] - x[..., None, :]
    c = c[..., None, :]
    lo = np.zeros_like(gap)
    hi = gap.copy()
    for _ in range(BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        with np.errstate(divide="ignore", invalid="ignore"):
            f = np.sum(c / phi(base + mid[..., None]), axis=-1)
        right = f > 0
        lo = np.where(right, mid, lo)
        hi = np.where(right, hi, mid)
    xi = x[..., 1:] + 0.5 * (lo + hi)
    if check:
        err = np.max(np.abs(beta_from_interlacing(x, xi, nodes) - beta), initial=0.0)
        if not err <= INTERLACING_TOL:
            raise ArithmeticError(f"interlacing recovery failed: forward-map error {err:.3g}")
    return xi


# ---------------------------------------------------------------------------
# Gauss-Jacobi
# ---------------------------------------------------------------------------


@lru_cache(maxsize=256)
def _jacobi_rule(n: int, a: float, b: float):
    t, w = roots_jacobi(n, a, b)
    t.setflags(write=False)
    w.setflags(write=False)
    return t, w


def gauss_jacobi(n: int, a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights for the weight (1 - t)^a (1 + t)^b on (-1, 1)."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if not (a > -1 and b > -1):
        raise ValueError("Jacobi exponents must exceed -1")
    return _jacobi_rule(int(n), float(a), float(b))


# ---------------------------------------------------------------------------
# matrix ball
# ---------------------------------------------------------------------------


def _unit_ball_points(rng: np.random.Generator, size: int, dim: int) -> np.ndarray:
    g = rng.standard_normal((size, dim))
    g /= np.linalg.norm(g, axis=-1, keepdims=True)
    return g * rng.random((size, 1)) ** (1.0 / dim)


def _ball_q1(d: int, gamma: float, rng: np.random.Generator, size: int) -> np.ndarray:
    # density r^{d-1} (1 - r^2)^gamma  <=>  r^2 ~ Beta(d/2, gamma + 1)
    r = np.sqrt(rng.beta(d / 2, gamma + 1.0, size=size))
    g = rng.standard_normal((size, d))
    g /= np.linalg.norm(g, axis=-1, keepdims=True)
    return nf.from_real_coords(r[:, None] * g, 1, d)


def _ball_rejection(q: int, d: int, gamma: float, rng: np.random.Generator, size: int):
    # proposal: each column uniform in the unit ball of R^{dq}; the matrix ball
    # lies inside this product set because every column of w has norm < 1
    dim = d * q
    eye = nf.identity(q, d)  # used for q x q blocks larger than 2 x 2
    pts, wts = [], []
    have, rate = 0, 0.2
    while have < size:
        m = int(1.25 * (size - have) / rate) + 32
        cols = _unit_ball_points(rng, m * q, dim).reshape(m, q, q, d)
        coords = np.swapaxes(cols, 1, 2).reshape(m, -1)
        w = nf.from_real_coords(coords, q, d)
        if q == 2 and d != 4:
            # Sylvester's criterion on the 2 x 2 Gram matrix I - w* w
            g11, det = nf.ball_gram_2x2(w)
            ok = (g11 > 0) & (det > 0)
            logdet = np.log(det[ok])
        else:
            ev = np.linalg.eigvalsh(eye - nf.adjoint(w) @ w)
            ok = ev[:, 0] > 0
            logdet = np.log(nf.collapse(ev[ok], d)).sum(axis=-1)
        rate = max(ok.mean(), 1e-4)
        pts.append(w[ok])
        wts.append(np.exp(gamma * logdet))
        have += int(ok.sum())
    return np.concatenate(pts)[:size], np.concatenate(wts)[:size]


def ball_sampler(q: int, d: int, gamma: float, rng: np.random.Generator, size: int = 1) -> WeightedSample:
    """Draws from the density proportional to det(I - w* w)^gamma on the matrix ball.

    For q = 1 the draw is exact (unit weights).  For q >= 2 points are
    uniform on the ball and carry weight det(I - w* w)^gamma; estimators
    must self-normalise.
    """
    nf.check_field(d)
    if not gamma > -1:
        raise ValueError(f"ball exponent gamma must exceed -1, got {gamma}")
    if q == 1:
        return WeightedSample(_ball_q1(d, gamma, rng, size), np.ones(size))
    if gamma < -0.4:
        warnings.warn(
            f"gamma={gamma:.3g} < -0.4: importance weights are heavy-tailed near the ball boundary",
            VarianceWarning,
            stacklevel=2,
        )
    pts, wts = _ball_rejection(q, d, gamma, rng, size)
    return WeightedSample(pts, wts)


def draw_ball(q: int, d: int, gamma: float, n: int, seed: int, workers: int = 1) -> WeightedSample:
    """``n`` block-seeded ball draws (deterministic in ``(seed, n)``)."""
    with warnings.catch_warnings():
        if q >= 2 and gamma < -0.4:
            warnings.warn(
                f"gamma={gamma:.3g} < -0.4: importance weights are heavy-tailed",
                VarianceWarning,
                stacklevel=2,
            )
        warnings.simplefilter("ignore", VarianceWarning)

        def run(b, size):
            return ball_sampler(q, d, gamma, block_rng(seed, STREAM_BALL, b), size)

        parts = map_blocks(run, n, workers)
    return WeightedSample.concatenate(parts)


def acceptance_rate(q: int, d: int, n: int = 100_000, seed: int = 0) -> float:
    """Fraction of column-ball proposals that land in the matrix ball."""
    rng = np.random.default_rng(seed)
    cols = _unit_ball_points(rng, n * q, d * q).reshape(n, q, q, d)
    w = nf.from_real_coords(np.swapaxes(cols, 1, 2).reshape(n, -1), q, d)
    return float(np.mean(nf.in_matrix_ball(w, d)))


# ---------------------------------------------------------------------------
# estimators
# ---------------------------------------------------------------------------


def weighted_mean(values, weights=None) -> EstimateWithError:
    """Self-normalised mean sum(w f) / sum(w) with delta-method standard error."""
    f = np.asarray(values)
    n = f.shape[0]
    if n < 2:
        raise ValueError("at least two samples are required")
    if weights is None:
        value = f.mean()
        se = np.sqrt(np.mean(np.abs(f - value) ** 2) / (n - 1))
        return EstimateWithError(complex(value), float(se), n)
    w = np.asarray(weights, dtype=np.float64)
    total = w.sum()
    if not total > 0:
        raise ValueError("all weights are zero")
    wn = w / total
    value = np.sum(wn * f)
    se = np.sqrt(np.sum(wn**2 * np.abs(f - value) ** 2) * n / (n - 1))
    return EstimateWithError(complex(value), float(se), n)


class WeightedAccumulator:
    """Streaming version of :func:`weighted_mean` (sums are combined in call order)."""

    def __init__(self):
        self.n = 0
        self.sw = 0.0
        self.swf = 0j
        self.sw2 = 0.0
        self.sw2f = 0j
        self.sw2f2 = 0.0

    def add(self, values, weights) -> None:
        f = np.asarray(values)
        w = np.asarray(weights, dtype=np.float64)
        w2 = w * w
        self.n += f.shape[0]
        self.sw += w.sum()
        self.swf += np.sum(w * f)
        self.sw2 += w2.sum()
        self.sw2f += np.sum(w2 * f)
        self.sw2f2 += np.sum(w2 * np.abs(f) ** 2)

    def merge(self, other: "WeightedAccumulator") -> "WeightedAccumulator":
        for name in ("n", "sw", "swf", "sw2", "sw2f", "sw2f2"):
            setattr(self, name, getattr(self, name) + getattr(other, name))
        return self

    def result(self) -> EstimateWithError:
        if self.n < 2:
            raise ValueError("at least two samples are required")
        if not self.sw > 0:
            raise ValueError("all weights are zero")
        value = self.swf / self.sw
        var = self.sw2f2 - 2 * np.real(np.conj(value) * self.sw2f) + abs(value) ** 2 * self.sw2
        se = math.sqrt(max(var, 0.0) * self.n / (self.n - 1)) / self.sw
        return EstimateWithError(complex(value), float(se), self.n)


def mc_estimate(samples: WeightedSample, f: Callable[[np.ndarray], np.ndarray]) -> EstimateWithError:
    """Self-normalised estimate of the integral of ``f`` under the weighted samples."""
    values = f(samples.points)
    if samples.mass is not None:
        values = samples.mass * values
    return weighted_mean(values, samples.weights)


def paired_difference(a, b, weights=None) -> EstimateWithError:
    """Estimate of E[a] - E[b] from paired (common random number) samples."""
    return weighted_mean(np.asarray(a) - np.asarray(b), weights)
