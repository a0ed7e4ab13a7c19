import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bcspherical import numfield as nf
from conftest import random_ball_point, random_matrix, random_unitary

FIELDS = (1, 2, 4)


def test_check_field_rejects_other_dimensions():
    for d in (0, 3, 8):
        with pytest.raises(ValueError):
            nf.check_field(d)


@pytest.mark.parametrize("d", FIELDS)
def test_real_coords_round_trip(rng, d):
    c = rng.standard_normal(d * 9)
    M = nf.from_real_coords(c, 3, d)
    assert M.shape == ((6, 6) if d == 4 else (3, 3))
    np.testing.assert_array_equal(nf.to_real_coords(M, d), c)


@pytest.mark.parametrize("d", FIELDS)
def test_adjoint_is_involution(rng, d):
    M = random_matrix(rng, 3, d)
    np.testing.assert_array_equal(nf.adjoint(nf.adjoint(M)), M)


def test_quaternion_embedding_is_multiplicative(rng):
    a = nf.from_real_coords(rng.standard_normal(4), 1, 4)
    b = nf.from_real_coords(rng.standard_normal(4), 1, 4)
    ab = a @ b
    # the product is again of the embedded form [[u, v], [-conj v, conj u]]
    assert np.allclose(ab[1, 1], np.conj(ab[0, 0]))
    assert np.allclose(ab[1, 0], -np.conj(ab[0, 1]))


@pytest.mark.parametrize("d", FIELDS)
def test_z_matrix_at_zero_is_identity(rng, d):
    w = random_matrix(rng, 3, d)
    np.testing.assert_array_equal(nf.z_matrix(np.zeros(3), w, d), nf.identity(3, d))


def test_z_matrix_scalar_values():
    assert nf.z_matrix([1.0], np.array([[0.0]]), 1)[0, 0] == pytest.approx(1.543081, abs=1e-6)
    assert nf.z_matrix([1.0], np.array([[1.0]]), 1)[0, 0] == pytest.approx(math.e, abs=1e-6)


def test_z_matrix_dimension_mismatch():
    with pytest.raises(ValueError):
        nf.z_matrix([1.0, 2.0], np.zeros((3, 3)), 1)


def test_singular_log_profile_examples():
    np.testing.assert_allclose(nf.singular_log_profile(np.eye(3), 1), 0.0, atol=1e-15)
    np.testing.assert_allclose(nf.singular_log_profile(np.diag([math.e**2, math.e**-1]), 1), [2, -1], atol=1e-14)
    z = nf.z_matrix([1.0], np.array([[0.0]]), 1)
    assert nf.singular_log_profile(z, 1)[0] == pytest.approx(0.433781, abs=1e-6)


@pytest.mark.parametrize("d", FIELDS)
@pytest.mark.parametrize("q", (1, 2, 3, 4))
def test_singular_log_profile_matches_gram_eigenvalues(rng, q, d):
    M = random_matrix(rng, q, d) + 3 * nf.identity(q, d)
    prof = nf.singular_log_profile(M, d)
    ev = nf.collapse(np.linalg.eigvalsh(nf.adjoint(M) @ M)[::-1], d)
    np.testing.assert_allclose(prof, 0.5 * np.log(ev), atol=1e-12)
    assert np.all(np.diff(prof) <= 1e-15)


def test_two_by_two_singular_values_against_svd(rng):
    M = rng.standard_normal((500, 2, 2)) + 1j * rng.standard_normal((500, 2, 2))
    fast = nf.singular_log_profile(M, 2)
    slow = np.log(np.linalg.svd(M, compute_uv=False))
    np.testing.assert_allclose(fast, slow, atol=1e-12)


def test_singular_matrix_raises():
    with pytest.raises(nf.SingularMatrixError):
        nf.singular_log_profile(np.array([[1.0, 2.0], [2.0, 4.0]]), 1)
    with pytest.raises(nf.SingularMatrixError):
        nf.log_abs_det(np.zeros((3, 3)), 1)


def test_hermitian_half_examples():
    assert nf.hermitian_half([2.0], np.array([[0.5]]), 1)[0, 0] == pytest.approx(1.0)
    np.testing.assert_array_equal(nf.hermitian_half([1.0, 1.0], np.eye(2), 1), np.eye(2))
    np.testing.assert_array_equal(nf.hermitian_half([1.0, 3.0], np.zeros((2, 2)), 1), np.zeros((2, 2)))


@pytest.mark.parametrize("d", FIELDS)
def test_hermitian_half_is_hermitian(rng, d):
    A = nf.hermitian_half(rng.standard_normal(3), random_matrix(rng, 3, d), d)
    np.testing.assert_allclose(A, nf.adjoint(A), atol=1e-15)


def test_hermitian_eigen_desc_examples():
    np.testing.assert_array_equal(nf.hermitian_eigen_desc(np.zeros((3, 3)), 1), [0, 0, 0])
    np.testing.assert_allclose(nf.hermitian_eigen_desc(np.diag([1.0, 3.0]), 1), [3, 1])
    np.testing.assert_allclose(nf.hermitian_eigen_desc(np.array([[0.0, 1.0], [1.0, 0.0]]), 1), [1, -1])


def test_hermitian_eigen_desc_rejects_non_hermitian():
    with pytest.raises(ValueError):
        nf.hermitian_eigen_desc(np.array([[0.0, 1.0], [0.0, 0.0]]), 1)


def test_quaternion_scalar_eigen_is_collapsed():
    A = nf.diag([2.5], 4)
    np.testing.assert_allclose(nf.hermitian_eigen_desc(A, 4), [2.5])


@pytest.mark.parametrize("d", FIELDS)
@pytest.mark.parametrize("q", (1, 2, 3, 4))
def test_eigen_invariant_under_unitary_conjugation(rng, q, d):
    A = nf.hermitian_half(rng.standard_normal(q), random_matrix(rng, q, d), d)
    U = random_unitary(rng, q, d)
    B = U @ A @ nf.adjoint(U)
    B = 0.5 * (B + nf.adjoint(B))
    np.testing.assert_allclose(nf.hermitian_eigen_desc(B, d), nf.hermitian_eigen_desc(A, d), atol=1e-9)


def test_log_abs_det_examples():
    assert nf.log_abs_det(np.eye(4), 1) == pytest.approx(0.0, abs=1e-15)
    assert nf.log_abs_det(np.diag([math.e, math.e]), 1) == pytest.approx(2.0, abs=1e-14)


@pytest.mark.parametrize("d", FIELDS)
@pytest.mark.parametrize("q", (1, 2, 3, 4))
def test_log_abs_det_matches_determinant(rng, q, d):
    M = random_matrix(rng, q, d) + 2 * nf.identity(q, d)
    embedded = np.log(abs(np.linalg.det(M)))
    expected = embedded / 2 if d == 4 else embedded
    assert nf.log_abs_det(M, d) == pytest.approx(expected, rel=1e-10)
    assert nf.log_abs_det(M, d) == pytest.approx(nf.singular_log_profile(M, d).sum(), rel=1e-10)


@pytest.mark.parametrize("q", (1, 2, 3))
def test_quaternion_spectra_come_in_pairs(rng, q):
    M = random_matrix(rng, q, 4)
    A = nf.hermitian_half(rng.standard_normal(q), M, 4)
    assert nf.pair_gap(np.linalg.eigvalsh(A), 4) < 1e-9
    assert nf.pair_gap(np.linalg.svd(M, compute_uv=False)[::-1], 4) < 1e-9


def test_in_matrix_ball_examples():
    assert nf.in_matrix_ball(np.zeros((2, 2)), 1)
    assert not nf.in_matrix_ball(np.eye(2), 1)
    assert nf.in_matrix_ball(np.array([[0.999]]), 1)
    assert not nf.in_matrix_ball(np.array([[1.001]]), 1)


@pytest.mark.parametrize("d", FIELDS)
def test_in_matrix_ball_batch_agrees_with_single(rng, d):
    w = np.stack([random_matrix(rng, 2, d, {1: 0.6, 2: 0.45, 4: 0.32}[d]) for _ in range(200)])
    batch = nf.in_matrix_ball(w, d)
    single = np.array([nf.in_matrix_ball(x, d) for x in w])
    np.testing.assert_array_equal(batch, single)
    assert 0 < batch.mean() < 1


@settings(max_examples=60, deadline=None)
@given(
    d=st.sampled_from(FIELDS),
    q=st.integers(1, 3),
    seed=st.integers(0, 2**32 - 1),
    scale=st.floats(0.0, 2.0),
)
def test_profile_exponentials_positive_and_decreasing(d, q, seed, scale):
    rng = np.random.default_rng(seed)
    w = random_ball_point(rng, q, d, 0.95)
    x = scale * rng.standard_normal(q)
    prof = nf.singular_log_profile(nf.z_matrix(x, w, d), d)
    e = np.exp(prof)
    assert np.all(e > 0)
    assert np.all(np.diff(e) <= 1e-12 * e.max())
