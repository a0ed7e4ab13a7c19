import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bcspherical import hermite as hm
from bcspherical import numfield as nf
from bcspherical.verify import polynomial_suite, random_hermitian

P = hm.MonicRealPolynomial


def test_monic_required():
    with pytest.raises(ValueError):
        P((2, 1))
    with pytest.raises(ValueError):
        P(())


def test_from_roots():
    assert P.from_roots([1, 2]).coefficients == (1, -3, 2)
    assert P.from_roots([0, 1, 1]).coefficients == (1, -2, 1, 0)


def test_newton_sums_examples():
    np.testing.assert_array_equal(hm.newton_sums(P((1, 0, 0, 0)), 4), [3, 0, 0, 0, 0])
    np.testing.assert_array_equal(hm.newton_sums(P((1, -2, 1, 0)), 4), [3, 2, 2, 2, 2])
    np.testing.assert_array_equal(hm.newton_sums(P.from_roots([1, 2]), 2), [2, 3, 5])


def test_newton_sums_are_exact_integers():
    p = hm.newton_sums(P.from_roots([3, -3, 2, 2, -1, 1]), 10)
    assert p.dtype.kind == "i"
    roots = np.array([3, -3, 2, 2, -1, 1])
    np.testing.assert_array_equal(p, [int((roots**k).sum()) for k in range(11)])


def test_newton_sums_negative_order():
    with pytest.raises(ValueError):
        hm.newton_sums(P((1, 0)), -1)


def test_distinct_root_count_examples():
    assert hm.distinct_root_count(P((1, 0, 0, 0, 0))) == 1
    assert hm.distinct_root_count(P((1, -2, 1, 0))) == 2
    B = hm.hankel_from_sums(hm.newton_sums(P((1, -2, 1, 0)), 4), 3)
    np.testing.assert_array_equal(B, [[3, 2, 2], [2, 2, 2], [2, 2, 2]])
    assert hm.distinct_root_count(P.from_roots([-3, -1, 0, 2, 3])) == 5


def test_distinct_root_count_tolerance_validation():
    with pytest.raises(ValueError):
        hm.distinct_root_count(P((1, 0)), tol=0)


def test_generated_suite_is_exact():
    for case in polynomial_suite(200, seed=4):
        assert hm.distinct_root_count(case.polynomial) == case.distinct


@settings(max_examples=100, deadline=None)
@given(
    a=st.lists(st.integers(-3, 3), min_size=1, max_size=3, unique=True),
    b=st.lists(st.integers(5, 8), min_size=1, max_size=3, unique=True),
    reps=st.integers(1, 2),
)
def test_counts_add_for_coprime_products(a, b, reps):
    pa = P.from_roots(a * reps)
    pb = P.from_roots(b)
    both = P.from_roots(a * reps + b)
    assert hm.distinct_root_count(both) == hm.distinct_root_count(pa) + hm.distinct_root_count(pb)


@settings(max_examples=100, deadline=None)
@given(roots=st.lists(st.integers(-3, 3), min_size=1, max_size=6), shift=st.integers(-10, 10))
def test_count_invariant_under_translation(roots, shift):
    base = hm.distinct_root_count(P.from_roots(roots))
    assert base == len(set(roots))
    assert hm.distinct_root_count(P.from_roots([r + shift for r in roots])) == base


def test_faddeev_leverrier_matches_numpy(rng):
    A = rng.standard_normal((5, 5))
    np.testing.assert_allclose(hm.faddeev_leverrier(A), np.poly(A), atol=1e-10)


def test_cluster_count():
    assert hm.cluster_count([1.0, 1.0 + 1e-12, 2.0], 1e-9) == 2
    assert hm.cluster_count([], 1e-9) == 0


def test_distinct_eigen_count_examples():
    assert hm.distinct_eigen_count(np.eye(3)) == 1
    assert hm.distinct_eigen_count(np.diag([1.0, 2.0, 2.0])) == 2
    assert hm.distinct_eigen_count(nf.diag([1.0, 2.0, 2.0], 4), 4) == 2


def test_distinct_eigen_count_rejects_non_hermitian():
    with pytest.raises(ValueError):
        hm.distinct_eigen_count(np.array([[0.0, 1.0], [0.0, 0.0]]))


@pytest.mark.parametrize("d", (1, 2, 4))
def test_hankel_and_clustering_agree_on_random_hermitian(rng, d):
    for _ in range(150):
        q = int(rng.integers(1, 5))
        A, k = random_hermitian(q, d, 1e-3, rng)
        assert hm.hankel_eigen_count(A) == k
        assert hm.distinct_eigen_count(A, d) == k


def test_hermitian_half_generically_has_two_eigenvalues(rng):
    X = np.array([1.0, 0.5, 0.2])
    counts = [
        hm.distinct_eigen_count(nf.hermitian_half(X, rng.uniform(-1, 1, (3, 3)), 1)) for _ in range(200)
    ]
    assert min(counts) >= 2
