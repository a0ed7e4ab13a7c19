"""Root data for BC_q and A_{q-1}, and finite-difference Dunkl operators.

The inner product on the Cartan coordinates is the standard Euclidean one.
Root multiplicities ``m_alpha`` follow the geometric table for the
spaces SO_0(p,q), SU(p,q) and Sp(p,q):

====================  ============
root                  multiplicity
====================  ============
e_i                   d (p - q)
2 e_i                 d - 1
e_i +- e_j            d
====================  ============

Operator conventions
--------------------
The trigonometric radial operator is

    L f = Laplacian f + sum_{alpha > 0} m_alpha coth(alpha(X)) d_alpha f,

with ``L phi_lambda = -(<lambda, lambda> + <rho, rho>) phi_lambda`` where
``rho = rho_bc``.  The rational Dunkl operators use ``k_alpha = m_alpha / 2``
so that, on W-invariant functions,

    sum_j T_j^2 f = Laplacian f + sum_{alpha > 0} 2 k_alpha d_alpha f / alpha(X)

is the radial Euclidean Laplacian and ``sum_j T_j^2 psi_lambda =
-<lambda, lambda> psi_lambda``.  Both conventions are pinned by the rank-one
Jacobi and Bessel equations (see the tests).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .numfield import check_field

DEFAULT_STEP = 1e-3
REGULARITY_TOL = 1e-8
INVARIANCE_TOL = 1e-8


class HyperplaneError(ValueError):
    """Raised when a point lies on (or too close to) a reflection hyperplane."""


@dataclass(frozen=True)
class RootWeights:
    """Coefficients attached to the three W-orbits of BC_q roots."""

    short: float  # e_i
    long: float  # 2 e_i
    middle: float  # e_i +- e_j

    def scaled(self, c: float) -> "RootWeights":
        return RootWeights(c * self.short, c * self.long, c * self.middle)


@dataclass(frozen=True)
class MultiplicityData:
    q: int
    d: int
    p: float

    def __post_init__(self):
        if int(self.q) != self.q or self.q < 1:
            raise ValueError(f"q must be a positive integer, got {self.q!r}")
        check_field(self.d)
        if not np.isfinite(self.p) or not self.p > 2 * self.q - 1:
            raise ValueError(f"p must exceed 2q-1 = {2 * self.q - 1}, got p={self.p!r}")

    @property
    def gamma(self) -> float:
        """Exponent of det(I - w* w) in the matrix-ball density."""
        return self.p * self.d / 2 - self.d * (self.q - 0.5) - 1

    @property
    def det_exponent(self) -> float:
        """Exponent of |det Z(X, w)| in the BC reduction formula."""
        return -self.d * (self.p + 1) / 2 + 1

    def multiplicities(self) -> RootWeights:
        return RootWeights(self.d * (self.p - self.q), self.d - 1.0, float(self.d))

    def dunkl_weights(self) -> RootWeights:
        return self.multiplicities().scaled(0.5)


def positive_roots(q: int) -> list[tuple[str, np.ndarray]]:
    """Positive roots of BC_q tagged by orbit: e_i, 2e_i, e_i - e_j, e_i + e_j."""
    eye = np.eye(q)
    roots = [("short", eye[i]) for i in range(q)]
    roots += [("long", 2 * eye[i]) for i in range(q)]
    for i, j in itertools.combinations(range(q), 2):
        roots.append(("middle", eye[i] - eye[j]))
        roots.append(("middle", eye[i] + eye[j]))
    return roots


def rho_bc(m: MultiplicityData) -> np.ndarray:
    i = np.arange(1, m.q + 1)
    return m.d / 2 * (m.p + m.q + 2 - 2 * i) - 1.0


def rho_a(q: int, d: int) -> np.ndarray:
    i = np.arange(1, q + 1)
    return d / 2 * (q + 1 - 2 * i)


def half_root_sum(q: int, weights: RootWeights) -> np.ndarray:
    """(1/2) sum of positive roots weighted by ``weights``."""
    out = np.zeros(q)
    for kind, alpha in positive_roots(q):
        out += 0.5 * getattr(weights, kind) * alpha
    return out


@dataclass(frozen=True)
class SignedPermutation:
    """Element of the hyperoctahedral group acting by (s v)_i = sign_i v_{perm^-1(i)}."""

    perm: tuple[int, ...]
    signs: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.perm) != list(range(len(self.perm))):
            raise ValueError(f"not a permutation: {self.perm}")
        if len(self.signs) != len(self.perm) or any(s not in (-1, 1) for s in self.signs):
            raise ValueError(f"signs must be +-1, one per coordinate: {self.signs}")

    @classmethod
    def identity(cls, q: int) -> "SignedPermutation":
        return cls(tuple(range(q)), (1,) * q)

    @property
    def q(self) -> int:
        return len(self.perm)

    def apply(self, v):
        v = np.asarray(v)
        inv = np.argsort(self.perm)
        return np.asarray(self.signs) * v[..., inv]

    __call__ = apply

    def compose(self, other: "SignedPermutation") -> "SignedPermutation":
        """self o other."""
        # coordinate j travels to slot perm[j]; signs are attached to the target slot
        perm = tuple(self.perm[other.perm[j]] for j in range(self.q))
        signs = [0] * self.q
        for j in range(self.q):
            signs[perm[j]] = self.signs[perm[j]] * other.signs[other.perm[j]]
        return SignedPermutation(perm, tuple(signs))

    def inverse(self) -> "SignedPermutation":
        inv = tuple(int(k) for k in np.argsort(self.perm))
        signs = tuple(self.signs[self.perm[i]] for i in range(self.q))
        return SignedPermutation(inv, signs)

    @property
    def is_type_a(self) -> bool:
        return all(s == 1 for s in self.signs)


def weyl_apply(s: SignedPermutation, v):
    return s.apply(v)


def signed_permutations(q: int) -> list[SignedPermutation]:
    out = []
    for perm in itertools.permutations(range(q)):
        for signs in itertools.product((1, -1), repeat=q):
            out.append(SignedPermutation(perm, signs))
    return out


def random_signed_permutation(q: int, rng: np.random.Generator) -> SignedPermutation:
    perm = tuple(int(k) for k in rng.permutation(q))
    signs = tuple(int(s) for s in rng.choice([-1, 1], size=q))
    return SignedPermutation(perm, signs)


def dominant_bc(x) -> np.ndarray:
    """Representative of the W-orbit in the closed chamber x_1 >= ... >= x_q >= 0."""
    return -np.sort(-np.abs(np.asarray(x, dtype=np.float64)), axis=-1)


def reflect(alpha: np.ndarray, X: np.ndarray) -> np.ndarray:
    return X - 2 * (alpha @ X) / (alpha @ alpha) * alpha


# ---------------------------------------------------------------------------
# finite-difference operators on black-box functions
# ---------------------------------------------------------------------------

Func = Callable[[np.ndarray], complex]


def _weights_for(m: MultiplicityData | RootWeights, dunkl: bool) -> RootWeights:
    if isinstance(m, RootWeights):
        return m
    return m.dunkl_weights() if dunkl else m.multiplicities()


def _check_regular(X: np.ndarray) -> None:
    for kind, alpha in positive_roots(X.shape[-1]):
        if abs(alpha @ X) <= REGULARITY_TOL:
            raise HyperplaneError(
                f"X={X.tolist()} lies on the hyperplane of the {kind} root {alpha.tolist()}"
            )


def _directional(f: Func, X: np.ndarray, xi: np.ndarray, h: float) -> complex:
    return (f(X + h * xi) - f(X - h * xi)) / (2 * h)


def dunkl_apply(
    f: Func,
    xi: Sequence[float],
    X: Sequence[float],
    m: MultiplicityData | RootWeights,
    h: float = DEFAULT_STEP,
) -> complex:
    """Rational Dunkl operator T_xi applied to ``f`` at ``X``.

    The derivative is a central difference with step ``h``; the reflection
    terms are evaluated exactly.  ``m`` may be a :class:`MultiplicityData`
    (then ``k = m / 2``) or explicit :class:`RootWeights` used as ``k``.
    """
    X = np.asarray(X, dtype=np.float64)
    xi = np.asarray(xi, dtype=np.float64)
    _check_regular(X)
    k = _weights_for(m, dunkl=True)
    fX = f(X)
    out = _directional(f, X, xi, h)
    for kind, alpha in positive_roots(X.shape[-1]):
        ka = getattr(k, kind)
        if ka:
            out += ka * (alpha @ xi) * (fX - f(reflect(alpha, X))) / (alpha @ X)
    return complex(out)


def _spot_check_invariance(f: Func, X: np.ndarray, fX: complex, rng) -> None:
    q = X.shape[-1]
    s = random_signed_permutation(q, rng)
    while s == SignedPermutation.identity(q):
        s = random_signed_permutation(q, rng)
    fs = f(s.apply(X))
    if abs(fs - fX) > INVARIANCE_TOL * max(1.0, abs(fX)):
        raise ValueError(
            f"function is not W-invariant: f(sX) - f(X) = {abs(fs - fX):.3g} for s={s}"
        )


def _radial_operator(f: Func, X: np.ndarray, drift: Callable[[str, np.ndarray], float], h: float):
    # root derivatives d_alpha f = <alpha, grad f> reuse the axis stencil
    q = X.shape[-1]
    eye = np.eye(q)
    fX = f(X)
    up = [f(X + h * e) for e in eye]
    dn = [f(X - h * e) for e in eye]
    lap = sum((u - 2 * fX + v) / h**2 for u, v in zip(up, dn))
    grad = np.array([(u - v) / (2 * h) for u, v in zip(up, dn)])
    first = 0.0
    for kind, alpha in positive_roots(q):
        c = drift(kind, alpha)
        if c:
            first += c * (alpha @ grad)
    return lap + first


def _richardson(op, h: float) -> complex:
    coarse = op(h)
    fine = op(h / 2)
    return complex((4 * fine - coarse) / 3)


def dunkl_laplacian_invariant(
    f: Func,
    X: Sequence[float],
    m: MultiplicityData | RootWeights,
    h: float = DEFAULT_STEP,
    seed: int = 0,
    check: bool = True,
) -> complex:
    """sum_j T_j^2 f at X for a W-invariant ``f``.

    On invariant functions the reflection parts reduce to
    ``sum_alpha 2 k_alpha d_alpha f / alpha(X)``.  Differences use steps
    ``h`` and ``h/2`` combined by Richardson extrapolation.  If ``f`` is a
    Monte-Carlo estimator it must use common random numbers across calls.
    """
    X = np.asarray(X, dtype=np.float64)
    _check_regular(X)
    if check:
        _spot_check_invariance(f, X, f(X), np.random.default_rng(seed))
    k = _weights_for(m, dunkl=True)

    def drift(kind, alpha):
        return 2 * getattr(k, kind) / (alpha @ X)

    return _richardson(lambda step: _radial_operator(f, X, drift, step), h)


def cherednik_radial_invariant(
    f: Func,
    X: Sequence[float],
    m: MultiplicityData | RootWeights,
    h: float = DEFAULT_STEP,
    seed: int = 0,
    check: bool = True,
) -> complex:
    """Trigonometric radial operator Laplacian + sum m_alpha coth(alpha(X)) d_alpha at X.

    Same differencing and ``check`` semantics as :func:`dunkl_laplacian_invariant`.
    """
    X = np.asarray(X, dtype=np.float64)
    _check_regular(X)
    if np.any(np.diff(X) >= 0) or X[-1] <= 0:
        raise ValueError(f"X must be strictly dominant (x_1 > ... > x_q > 0), got {X.tolist()}")
    if check:
        _spot_check_invariance(f, X, f(X), np.random.default_rng(seed))
    mult = _weights_for(m, dunkl=False)

    def drift(kind, alpha):
        return getattr(mult, kind) / np.tanh(alpha @ X)

    return _richardson(lambda step: _radial_operator(f, X, drift, step), h)


def apply_batched(operator: Callable, batch: Callable[[np.ndarray], np.ndarray], *args, **kwargs):
    """Run ``operator(f, *args, **kwargs)`` with all evaluations of ``f`` done in one batch.

    The operator is first run on the constant function 1 to record its
    evaluation points; ``batch`` maps an ``(n, q)`` array of points to their
    ``n`` values; the operator is then replayed on those values.  This lets a
    Monte-Carlo estimator share one pass over its samples between all
    stencil points.
    """
    points: list[np.ndarray] = []

    def record(Y):
        points.append(np.array(Y, dtype=np.float64))
        return 1.0

    operator(record, *args, **kwargs)
    unique = {p.tobytes(): p for p in points}
    keys = list(unique)
    values = batch(np.array([unique[k] for k in keys]))
    table = dict(zip(keys, values))
    return operator(lambda Y: table[np.asarray(Y, dtype=np.float64).tobytes()], *args, **kwargs)


def stencil(operator: Callable, *args, **kwargs) -> tuple[np.ndarray, np.ndarray]:
    """Points and coefficients with ``operator(f) = sum_i c_i f(Y_i)``.

    Valid for the linear finite-difference operators of this module; the
    invariance spot check is disabled while the coefficients are read off.
    """
    kwargs = dict(kwargs, check=False)
    points: list[np.ndarray] = []

    def record(Y):
        points.append(np.array(Y, dtype=np.float64))
        return 0.0

    operator(record, *args, **kwargs)
    unique = {p.tobytes(): p for p in points}
    keys = list(unique)
    coeffs = np.empty(len(keys))
    for i, key in enumerate(keys):
        coeffs[i] = operator(
            lambda Y, key=key: float(np.asarray(Y, dtype=np.float64).tobytes() == key), *args, **kwargs
        ).real
    return np.array([unique[k] for k in keys]), coeffs
