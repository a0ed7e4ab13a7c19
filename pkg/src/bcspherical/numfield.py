"""Matrix arithmetic over R, C and H.

A q x q matrix over the division algebra of real dimension ``d`` is stored as
a plain numpy array:

* ``d = 1``: real array of shape ``(..., q, q)``;
* ``d = 2``: complex array of shape ``(..., q, q)``;
* ``d = 4``: complex array of shape ``(..., 2q, 2q)``, the standard 2 x 2
  complex embedding of each quaternion entry ``a + b j`` (``a, b`` complex)
  as ``[[a, b], [-conj(b), conj(a)]]``.

Every routine accepts arbitrary leading batch dimensions.  Spectral routines
undo the doubling that the quaternion embedding introduces, so callers always
receive q values.
"""

from __future__ import annotations

import numpy as np

FIELD_DIMS = (1, 2, 4)

# relative threshold below which a matrix is treated as singular
SINGULAR_RTOL = 1e-12


class SingularMatrixError(ArithmeticError):
    """Raised when a matrix that must be invertible is numerically singular."""


def check_field(d: int) -> int:
    if d not in FIELD_DIMS:
        raise ValueError(f"d must be one of {FIELD_DIMS}, got {d!r}")
    return int(d)


def block(d: int) -> int:
    """Size of the complex block representing one field entry."""
    return 2 if check_field(d) == 4 else 1


def matrix_order(q: int, d: int) -> int:
    return q * block(d)


def dtype(d: int):
    return np.float64 if check_field(d) == 1 else np.complex128


def field_q(M: np.ndarray, d: int) -> int:
    """Matrix size q over the field, read off the stored array."""
    n = M.shape[-1]
    if M.shape[-2] != n or n % block(d):
        raise ValueError(f"not a square matrix over the d={d} field: {M.shape}")
    return n // block(d)


def spread(x, d: int) -> np.ndarray:
    """Repeat a (..., q) vector so that it lines up with the stored matrix axis."""
    x = np.asarray(x, dtype=np.float64)
    return np.repeat(x, 2, axis=-1) if check_field(d) == 4 else x


def collapse(values: np.ndarray, d: int) -> np.ndarray:
    """Merge the doubled spectrum of the quaternion embedding.

    ``values`` is sorted along the last axis, so equal pairs are adjacent.
    """
    if check_field(d) != 4:
        return values
    shape = values.shape[:-1] + (values.shape[-1] // 2, 2)
    return values.reshape(shape).mean(axis=-1)


def pair_gap(values: np.ndarray, d: int) -> float:
    """Largest discrepancy inside the eigenvalue pairs of an embedded spectrum."""
    if check_field(d) != 4:
        return 0.0
    v = values.reshape(values.shape[:-1] + (values.shape[-1] // 2, 2))
    return float(np.max(np.abs(v[..., 0] - v[..., 1]), initial=0.0))


def identity(q: int, d: int) -> np.ndarray:
    return np.eye(matrix_order(q, d), dtype=dtype(d))


def diag(x, d: int) -> np.ndarray:
    x = spread(x, d)
    out = np.zeros(x.shape + (x.shape[-1],), dtype=dtype(d))
    idx = np.arange(x.shape[-1])
    out[..., idx, idx] = x
    return out


def adjoint(M: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(M, -1, -2))


def from_real_coords(coords, q: int, d: int) -> np.ndarray:
    """Build matrices from ``d * q * q`` real coordinates (row-major entries).

    Quaternion coordinates ``(a0, a1, a2, a3)`` stand for
    ``a0 + a1 i + a2 j + a3 k``.
    """
    check_field(d)
    c = np.asarray(coords, dtype=np.float64)
    if c.shape[-1] != d * q * q:
        raise ValueError(f"expected {d * q * q} real coordinates, got {c.shape[-1]}")
    c = c.reshape(c.shape[:-1] + (q, q, d))
    if d == 1:
        return c[..., 0].copy()
    if d == 2:
        return c[..., 0] + 1j * c[..., 1]
    a = c[..., 0] + 1j * c[..., 1]
    b = c[..., 2] + 1j * c[..., 3]
    out = np.empty(c.shape[:-3] + (2 * q, 2 * q), dtype=np.complex128)
    out[..., 0::2, 0::2] = a
    out[..., 0::2, 1::2] = b
    out[..., 1::2, 0::2] = -np.conj(b)
    out[..., 1::2, 1::2] = np.conj(a)
    return out


def to_real_coords(M: np.ndarray, d: int) -> np.ndarray:
    """Inverse of :func:`from_real_coords`."""
    check_field(d)
    if d == 1:
        c = np.real(M)[..., None]
    elif d == 2:
        c = np.stack([M.real, M.imag], axis=-1)
    else:
        a = M[..., 0::2, 0::2]
        b = M[..., 0::2, 1::2]
        c = np.stack([a.real, a.imag, b.real, b.imag], axis=-1)
    return c.reshape(c.shape[:-3] + (-1,))


def unit_matrix(q: int, d: int, i: int, j: int) -> np.ndarray:
    """Elementary matrix E_{i,j} (zero-based) with real unit entry."""
    E = np.zeros((q, q))
    E[i, j] = 1.0
    return np.kron(E, np.eye(block(d))).astype(dtype(d))


def _check_shapes(x: np.ndarray, w: np.ndarray, d: int) -> None:
    if x.shape[-1] != field_q(w, d):
        raise ValueError(f"dimension mismatch: X has {x.shape[-1]} entries, w is {w.shape}")


def z_matrix(x, w: np.ndarray, d: int) -> np.ndarray:
    """Z(X, w) = cosh X + sinh X w with X acting as a diagonal matrix."""
    x = np.asarray(x, dtype=np.float64)
    _check_shapes(x, w, d)
    c = spread(np.cosh(x), d)
    s = spread(np.sinh(x), d)
    Z = s[..., :, None] * w
    idx = np.arange(c.shape[-1])
    Z[..., idx, idx] += c
    return Z


def hermitian_half(x, w: np.ndarray, d: int) -> np.ndarray:
    """(X w + w* X) / 2."""
    x = np.asarray(x, dtype=np.float64)
    _check_shapes(x, w, d)
    xs = spread(x, d)
    Xw = xs[..., :, None] * w
    return 0.5 * (Xw + adjoint(Xw))


def _singular_values_2x2(M: np.ndarray) -> np.ndarray:
    # sigma^2 are the roots of t^2 - |M|_F^2 t + |det M|^2; the small root is
    # taken from the product to avoid cancellation
    fro = np.sum(np.abs(M) ** 2, axis=(-2, -1))
    det = np.abs(M[..., 0, 0] * M[..., 1, 1] - M[..., 0, 1] * M[..., 1, 0]) ** 2
    big = 0.5 * (fro + np.sqrt(np.maximum(fro * fro - 4 * det, 0.0)))
    small = np.divide(det, big, out=np.zeros_like(big), where=big > 0)
    return np.sqrt(np.stack([big, small], axis=-1))


def _singular_values(M: np.ndarray) -> np.ndarray:
    if M.shape[-2:] == (2, 2):
        s = _singular_values_2x2(M)
    else:
        s = np.linalg.svd(M, compute_uv=False)
    smax = s[..., :1]
    bad = s[..., -1:] <= SINGULAR_RTOL * smax
    if np.any(bad):
        raise SingularMatrixError(
            "matrix is numerically singular (smallest singular value below "
            f"{SINGULAR_RTOL:g} x largest)"
        )
    return s


def singular_log_profile(M: np.ndarray, d: int) -> np.ndarray:
    """Logarithms of the singular values of ``M`` in decreasing order."""
    return collapse(np.log(_singular_values(M)), d)


def log_abs_det(M: np.ndarray, d: int) -> np.ndarray:
    """log |det M| over the field, as the sum of log singular values."""
    return singular_log_profile(M, d).sum(axis=-1)


def hermitian_eigen_desc(A: np.ndarray, d: int, tol: float = 1e-9) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix over the field, in decreasing order."""
    scale = np.maximum(1.0, np.max(np.abs(A), axis=(-2, -1)))
    asym = np.max(np.abs(A - adjoint(A)), axis=(-2, -1))
    if np.any(asym > tol * scale):
        raise ValueError(f"matrix is not Hermitian (asymmetry {np.max(asym):.3g})")
    if d != 4 and A.shape[-2:] == (2, 2):
        return _eigh_desc_2x2(A)
    ev = np.linalg.eigvalsh(A)[..., ::-1]
    return collapse(ev, d)


def _eigh_desc_2x2(A: np.ndarray) -> np.ndarray:
    a = A[..., 0, 0].real
    c = A[..., 1, 1].real
    mid = 0.5 * (a + c)
    rad = np.hypot(0.5 * (a - c), np.abs(A[..., 0, 1]))
    return np.stack([mid + rad, mid - rad], axis=-1)


def ball_gram_2x2(w: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Leading entry and determinant of I - w* w for 2 x 2 matrices."""
    g11 = 1 - np.abs(w[..., 0, 0]) ** 2 - np.abs(w[..., 1, 0]) ** 2
    g22 = 1 - np.abs(w[..., 0, 1]) ** 2 - np.abs(w[..., 1, 1]) ** 2
    g12 = -(np.conj(w[..., 0, 0]) * w[..., 0, 1] + np.conj(w[..., 1, 0]) * w[..., 1, 1])
    return g11, g11 * g22 - np.abs(g12) ** 2


def in_matrix_ball(w: np.ndarray, d: int) -> np.ndarray | bool:
    """True where I - w* w is positive definite.

    A single matrix is tested by attempting a Cholesky factorisation; batches
    use the smallest eigenvalue, which decides the same predicate.
    """
    G = identity(field_q(w, d), d) - adjoint(w) @ w
    if w.ndim == 2:
        try:
            np.linalg.cholesky(G)
        except np.linalg.LinAlgError:
            return False
        return True
    return np.linalg.eigvalsh(G)[..., 0] > 0.0
