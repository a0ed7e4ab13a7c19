"""Weyl-orbit polytopes C(X), C^A(X) and the ball maps w -> X(w), w -> X'(w).

``C(X)`` is the convex hull of the signed-permutation orbit of ``X`` and
``C^A(X)`` that of its permutation orbit.  Both are described by
partial-sum (majorisation) inequalities on sorted coordinates, so the tests
below never enumerate index subsets.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import numfield as nf
from .hermite import distinct_eigen_count
from .rootdata import dominant_bc

BOUNDARY_SLACK = 1e-9
TRACE_RTOL = 1e-10
GRADIENT_TOL = 1e-8
EIGEN_GAP_TOL = 1e-9
FD_STEP = 1e-6
MAX_HALVINGS = 20

SETTINGS = ("trig", "rational")


def check_setting(setting: str) -> str:
    if setting not in SETTINGS:
        raise ValueError(f"setting must be one of {SETTINGS}, got {setting!r}")
    return setting


@dataclass(frozen=True)
class ChamberPoint:
    """A Cartan vector with an optional verified chamber tag."""

    x: tuple
    chamber: str = "general"

    def __post_init__(self):
        x = np.asarray(self.x, dtype=np.float64)
        object.__setattr__(self, "x", tuple(float(v) for v in x))
        if self.chamber == "dominantBC":
            if np.any(np.diff(x) > 0) or (x.size and x[-1] < 0):
                raise ValueError(f"not in the closed BC chamber: {self.x}")
        elif self.chamber == "dominantA":
            if np.any(np.diff(x) > 0):
                raise ValueError(f"not in the closed A chamber: {self.x}")
        elif self.chamber != "general":
            raise ValueError(f"unknown chamber tag {self.chamber!r}")

    @property
    def array(self) -> np.ndarray:
        return np.array(self.x)

    @property
    def q(self) -> int:
        return len(self.x)


def _slack(X: np.ndarray) -> float:
    return BOUNDARY_SLACK * max(1.0, float(np.max(np.abs(X), initial=0.0)))


def in_dual_cone(H) -> np.ndarray | bool:
    """All leading partial sums of ``H`` strictly positive."""
    return np.all(np.cumsum(np.asarray(H, dtype=np.float64), axis=-1) > 0, axis=-1)


def bc_violation(X, H) -> np.ndarray:
    """Largest excess of the sorted |h| partial sums over those of ``X`` (<= 0 inside)."""
    xs = np.cumsum(dominant_bc(X))
    hs = np.cumsum(dominant_bc(H), axis=-1)
    return np.max(hs - xs, axis=-1)


def in_C(X, H, strict: bool = False) -> np.ndarray | bool:
    """Membership of ``H`` in C(X) (interior when ``strict``)."""
    X = np.asarray(X, dtype=np.float64)
    excess = bc_violation(X, H)
    return excess < 0 if strict else excess <= _slack(X)


def in_CA(X, H, strict: bool = False) -> np.ndarray | bool:
    """Membership of ``H`` in C^A(X); interiority is relative to the trace hyperplane."""
    X = -np.sort(-np.asarray(X, dtype=np.float64))
    H = np.asarray(H, dtype=np.float64)
    xs = np.cumsum(X)
    hs = np.cumsum(-np.sort(-H, axis=-1), axis=-1)
    scale = max(1.0, float(np.max(np.abs(X), initial=0.0)))
    on_trace = np.abs(hs[..., -1] - xs[-1]) <= TRACE_RTOL * scale * X.size
    excess = hs[..., :-1] - xs[:-1]
    if strict:
        ok = np.all(excess < 0, axis=-1)
    else:
        ok = np.all(excess <= _slack(X), axis=-1)
    return on_trace & ok


def x_of_w(X, w: np.ndarray, d: int) -> np.ndarray:
    """X(w): decreasing log singular values of Z(X, w)."""
    return nf.singular_log_profile(nf.z_matrix(X, w, d), d)


def xdot0_of_w(X, w: np.ndarray, d: int) -> np.ndarray:
    """Decreasing eigenvalues of (X w + w* X) / 2."""
    return nf.hermitian_eigen_desc(nf.hermitian_half(X, w, d), d)


def profile(X, w: np.ndarray, d: int, setting: str) -> np.ndarray:
    return x_of_w(X, w, d) if check_setting(setting) == "trig" else xdot0_of_w(X, w, d)


def _trace_gradient(X: np.ndarray, w: np.ndarray, d: int, setting: str) -> np.ndarray:
    q = X.shape[-1]
    base = nf.to_real_coords(w, d)
    grad = np.empty(base.size)
    if setting == "rational":
        # tr((Xw + w*X)/2) is linear in w: read off its values on unit coordinates
        for k in range(base.size):
            e = np.zeros(base.size)
            e[k] = 1.0
            grad[k] = np.trace(nf.hermitian_half(X, nf.from_real_coords(e, q, d), d)).real
        return grad / nf.block(d)
    for k in range(base.size):
        e = np.zeros(base.size)
        e[k] = FD_STEP
        up = nf.log_abs_det(nf.z_matrix(X, nf.from_real_coords(base + e, q, d), d), d)
        dn = nf.log_abs_det(nf.z_matrix(X, nf.from_real_coords(base - e, q, d), d), d)
        grad[k] = (up - dn) / (2 * FD_STEP)
    return grad


def in_BqX(X, w: np.ndarray, d: int, setting: str = "trig") -> bool:
    """Regularity of ``w``: non-vanishing trace differential and non-scalar profile."""
    X = np.asarray(X, dtype=np.float64)
    check_setting(setting)
    if X.shape[-1] < 2:
        raise ValueError("the regularity set is defined for q >= 2")
    if not nf.in_matrix_ball(w, d):
        raise ValueError("w is not inside the open matrix ball")
    if np.linalg.norm(_trace_gradient(X, w, d, setting)) <= GRADIENT_TOL:
        return False
    if setting == "trig":
        prof = x_of_w(X, w, d)
        return distinct_eigen_count(np.diag(prof), 1, EIGEN_GAP_TOL) >= 2
    return distinct_eigen_count(nf.hermitian_half(X, w, d), d, EIGEN_GAP_TOL) >= 2


def _is_diagonal(w: np.ndarray) -> bool:
    return np.count_nonzero(w - np.diag(np.diag(w))) == 0


def split_perturbation(X, w0: np.ndarray, b: float, d: int, setting: str = "trig") -> np.ndarray:
    """w0 + b E_{1,q}, halving ``b`` until the profile splits at both ends.

    The result lies in the ball, its first profile entry exceeds that of
    ``w0`` and its last entry falls below it.
    """
    X = np.asarray(X, dtype=np.float64)
    q = X.shape[-1]
    if not _is_diagonal(w0):
        raise ValueError("w0 must be diagonal")
    if not nf.in_matrix_ball(w0, d):
        raise ValueError("w0 is not inside the open matrix ball")
    if b == 0:
        return w0.copy()
    if q < 2:
        raise ValueError("splitting needs q >= 2")
    base = profile(X, w0, d, setting)
    E = nf.unit_matrix(q, d, 0, q - 1)
    for _ in range(MAX_HALVINGS + 1):
        w = w0 + b * E
        if nf.in_matrix_ball(w, d):
            prof = profile(X, w, d, setting)
            if prof[0] > base[0] and prof[-1] < base[-1]:
                return w
        b /= 2
    raise ArithmeticError("no admissible perturbation size found after 20 halvings")


def _diagonal_from_profile(X: np.ndarray, u: np.ndarray, d: int, setting: str) -> np.ndarray:
    y = np.zeros_like(X)
    pos = X > 0
    if setting == "trig":
        y[pos] = (np.exp(u[pos]) - np.cosh(X[pos])) / np.sinh(X[pos])
    else:
        y[pos] = u[pos] / X[pos]
    return nf.diag(y, d)


def witness_profile(X, H) -> np.ndarray:
    """Diagonal profile U with H in C^A(U) built from the interior point H != 0."""
    X = np.asarray(X, dtype=np.float64)
    H = np.asarray(H, dtype=np.float64)
    q = X.size
    xs, hs = np.cumsum(X), np.cumsum(H)
    total = hs[-1]
    j = int(np.argmax(xs > total)) + 1  # smallest k with x_1 + ... + x_k > trace H
    bounds = [X[k] for k in range(j - 1)]
    bounds += [(xs[r - 1] - hs[r - 1]) / r for r in range(1, j + 1)]
    if j > 1:
        bounds.append((xs[j - 1] - total) / (j - 1))
    eps = 0.5 * min(bounds)
    u = np.zeros(q)
    u[: j - 1] = X[: j - 1] - eps
    u[j - 1] = (j - 1) * eps + total - (xs[j - 2] if j > 1 else 0.0)
    if not eps > 0:
        raise ArithmeticError(f"witness construction failed: epsilon bound {min(bounds):.3g} <= 0")
    return u


def interior_witness(X, H, d: int = 1, setting: str = "trig", b0: float = 0.1) -> np.ndarray:
    """A ball point w in B_q(X) with H in the relative interior of C^A(profile(w)).

    ``X`` must be in the closed BC chamber (non-zero) and ``H`` an interior
    point of C(X) in the same chamber.
    """
    X = np.asarray(X, dtype=np.float64)
    H = np.asarray(H, dtype=np.float64)
    check_setting(setting)
    ChamberPoint(X, "dominantBC")
    ChamberPoint(H, "dominantBC")
    q = X.size
    if q < 2:
        raise ValueError("interior witnesses are constructed for q >= 2")
    if not np.any(X > 0):
        raise ValueError("X must be non-zero")
    if not in_C(X, H, strict=True):
        raise ValueError(f"H={H.tolist()} is not interior to C(X) for X={X.tolist()}")
    u = np.zeros(q) if not np.any(H) else witness_profile(X, H)
    if np.any(np.abs(u[X > 0]) >= X[X > 0]) or np.any(u[X == 0] != 0):
        raise ArithmeticError(f"witness profile {u.tolist()} violates |u_i| < x_i")
    w0 = _diagonal_from_profile(X, u, d, setting)
    b = b0
    failure = ""
    for _ in range(MAX_HALVINGS):
        w = split_perturbation(X, w0, b, d, setting)
        prof = profile(X, w, d, setting)
        if not in_BqX(X, w, d, setting):
            failure = "w is not in the regularity set"
        elif not in_CA(prof, H, strict=True):
            failure = (
                f"H={H.tolist()} not strictly inside C^A({prof.tolist()}): "
                f"partial sums {np.cumsum(H).tolist()} vs {np.cumsum(prof).tolist()}"
            )
        else:
            return w
        b /= 2
    raise ArithmeticError(f"interior witness failed: {failure}")
