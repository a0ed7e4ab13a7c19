"""Counting distinct roots with the Hankel matrix of Newton power sums.

For a real polynomial with roots b_1..b_n, the n x n Hankel matrix
``B[i, j] = p_{i+j}`` built from the power sums ``p_k = sum b_j^k`` has rank
equal to the number of distinct roots.  The power sums are obtained from
the coefficients through Newton's identities, so no root finding is
involved.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .numfield import adjoint, check_field, collapse


@dataclass(frozen=True)
class MonicRealPolynomial:
    """Coefficients in decreasing degree order, leading coefficient exactly 1."""

    coefficients: tuple

    def __post_init__(self):
        if len(self.coefficients) == 0 or self.coefficients[0] != 1:
            raise ValueError("polynomial must be monic (leading coefficient 1)")

    @classmethod
    def from_roots(cls, roots: Sequence) -> "MonicRealPolynomial":
        coeffs = [1]
        for r in roots:
            nxt = coeffs + [0]
            for i in range(1, len(nxt)):
                nxt[i] -= r * coeffs[i - 1]
            coeffs = nxt
        return cls(tuple(coeffs))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1


def newton_sums(P: MonicRealPolynomial, m: int) -> np.ndarray:
    """Power sums p_0..p_m of the roots of ``P``.

    Uses the coefficients' own arithmetic, so integer input stays exact.
    """
    if m < 0:
        raise ValueError("m must be non-negative")
    n = P.degree
    a = P.coefficients  # a[0] = 1
    p = [n]
    for k in range(1, m + 1):
        s = 0
        for i in range(1, min(k - 1, n) + 1):
            s += a[i] * p[k - i]
        if k <= n:
            s += k * a[k]
        p.append(-s)
    return np.array(p, dtype=np.result_type(*[type(c) for c in a], np.int64))


def hankel_from_sums(p: np.ndarray, n: int) -> np.ndarray:
    i = np.arange(n)
    return np.asarray(p, dtype=np.float64)[i[:, None] + i[None, :]]


def _numerical_rank(B: np.ndarray, rtol: float) -> int:
    s = np.linalg.svd(B, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > rtol * s[0]))


def _taylor_shift(c: np.ndarray, shift: float) -> np.ndarray:
    """Coefficients (decreasing degree) of P(t + shift), by repeated synthetic division."""
    c = c.copy()
    n = c.size - 1
    for k in range(n):
        for i in range(1, n + 1 - k):
            c[i] += shift * c[i - 1]
    return c


def _scaled(P: MonicRealPolynomial) -> MonicRealPolynomial:
    """Centre the roots near their mean and rescale t -> s t into roughly [-1, 1].

    Both steps leave the number of distinct roots unchanged; ``s`` is a power
    of two, so the rescaling itself is exact.
    """
    n = P.degree
    c = np.asarray(P.coefficients, dtype=np.float64)
    # shift by the root mean -a_1/n rounded to an integer: exact for integer coefficients
    c = _taylor_shift(c, float(np.round(-c[1] / n)))
    k = np.arange(1, n + 1)
    radius = np.max(np.abs(c[1:]) ** (1.0 / k), initial=0.0)
    if radius == 0:
        return MonicRealPolynomial(tuple(float(v) for v in c))
    s = 2.0 ** np.ceil(np.log2(2 * radius))
    return MonicRealPolynomial(tuple(float(v) for v in c / s ** np.arange(n + 1)))


def distinct_root_count(P: MonicRealPolynomial, tol: float | None = None) -> int:
    """Number of distinct roots, as the numerical rank of the Hankel matrix.

    ``tol`` is relative to the largest singular value; the default is
    ``n * eps``.
    """
    n = P.degree
    if n == 0:
        return 0
    if tol is None:
        tol = n * np.finfo(np.float64).eps
    if tol <= 0:
        raise ValueError("tol must be positive")
    Q = _scaled(P)
    B = hankel_from_sums(newton_sums(Q, 2 * n - 2), n)
    return _numerical_rank(B, tol)


def faddeev_leverrier(A: np.ndarray) -> np.ndarray:
    """Characteristic polynomial coefficients of ``A`` (decreasing degree)."""
    n = A.shape[-1]
    coeffs = np.zeros(n + 1, dtype=A.dtype)
    coeffs[0] = 1.0
    M = np.zeros_like(A)
    eye = np.eye(n, dtype=A.dtype)
    for k in range(1, n + 1):
        M = A @ M + coeffs[k - 1] * eye
        coeffs[k] = -np.trace(A @ M) / k
    return coeffs


def cluster_count(values: np.ndarray, gap: float) -> int:
    """Number of groups in sorted real values separated by more than ``gap``."""
    v = np.sort(np.asarray(values, dtype=np.float64))
    if v.size == 0:
        return 0
    return 1 + int(np.sum(np.diff(v) > gap))


def distinct_eigen_count(A: np.ndarray, d: int = 1, tol: float = 1e-9) -> int:
    """Distinct eigenvalues of a Hermitian matrix over the d-field.

    Eigenvalue clustering with gap ``tol`` is cross-checked against the
    Hankel rank of the characteristic polynomial; the clustering count is
    returned and a disagreement larger than one raises.
    """
    check_field(d)
    A = np.asarray(A)
    scale = max(1.0, float(np.max(np.abs(A), initial=0.0)))
    if np.max(np.abs(A - adjoint(A)), initial=0.0) > 1e-9 * scale:
        raise ValueError("matrix is not Hermitian")
    ev = collapse(np.linalg.eigvalsh(A), d)
    clustered = cluster_count(ev, tol)
    hankel = hankel_eigen_count(A)
    if abs(hankel - clustered) > 1:
        raise ArithmeticError(
            f"Hankel rank {hankel} and eigenvalue clustering {clustered} disagree; "
            "matrix is too ill-conditioned to count eigenvalues"
        )
    return clustered


# Measured on conjugated Hermitian matrices (q <= 4, gaps >= 1e-3): rounding
# leaves null singular values below 1e-17 while genuine gaps stay above 4e-13.
HANKEL_EIGEN_RTOL = 1e-15


def hankel_eigen_count(A: np.ndarray, rtol: float = HANKEL_EIGEN_RTOL) -> int:
    """Distinct eigenvalues from the Hankel rank of the characteristic polynomial.

    The matrix is centred and normalised first; neither step changes the
    count.  For the quaternion embedding every root is doubled, which leaves
    the number of distinct roots unchanged.
    """
    A = np.asarray(A)
    n = A.shape[-1]
    centred = A - (np.trace(A).real / n) * np.eye(n)
    norm = np.linalg.norm(centred, 2)
    if norm <= 1e-12 * max(1.0, float(np.max(np.abs(A)))):
        return 1
    coeffs = np.real(faddeev_leverrier(centred / norm))
    coeffs[0] = 1.0
    return distinct_root_count(MonicRealPolynomial(tuple(coeffs)), tol=rtol)
