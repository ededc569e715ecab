import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gmpb.rng import create_rng
from gmpb.rotation import (
    PlanePair,
    SingularMatrixError,
    apply_givens_product,
    givens_matrix,
    gram_schmidt,
    orthonormality_error,
    plane_pairs,
    random_orthogonal,
    rotate_update,
)


@pytest.mark.parametrize("d", [1, 2, 3, 5, 50, 200])
def test_plane_pair_count(d):
    pairs = plane_pairs(d)
    assert len(pairs) == d * (d - 1) // 2
    assert pairs == sorted(pairs)
    assert all(0 <= p < q < d for p, q in pairs)


def test_plane_pairs_small():
    assert plane_pairs(1) == []
    assert plane_pairs(2) == [PlanePair(0, 1)]
    with pytest.raises(ValueError):
        plane_pairs(0)


class TestGivens:
    def test_zero_angle(self):
        assert np.array_equal(givens_matrix(4, PlanePair(1, 3), 0.0), np.eye(4))

    def test_quarter_turn(self):
        np.testing.assert_allclose(givens_matrix(2, PlanePair(0, 1), math.pi / 2), [[0, -1], [1, 0]], atol=1e-16)

    @settings(max_examples=100, deadline=None)
    @given(d=st.integers(2, 12), theta=st.floats(-math.pi, math.pi), data=st.data())
    def test_orthogonal(self, d, theta, data):
        p = data.draw(st.integers(0, d - 2))
        q = data.draw(st.integers(p + 1, d - 1))
        g = givens_matrix(d, PlanePair(p, q), theta)
        assert orthonormality_error(g) < 1e-12

    def test_bad_pair(self):
        with pytest.raises(ValueError):
            givens_matrix(3, PlanePair(2, 1), 0.1)

    def test_two_row_product_matches_dense(self):
        rng = create_rng(11)
        d = 6
        r = random_orthogonal(rng, d)
        pairs = plane_pairs(d)
        order = [pairs[i] for i in rng.next_permutation(len(pairs))]
        dense = np.eye(d)
        for pair in order:
            dense = dense @ givens_matrix(d, pair, 0.7)
        np.testing.assert_allclose(apply_givens_product(r, 0.7, order), dense @ r, atol=1e-12)


class TestGramSchmidt:
    def test_identity(self):
        assert np.array_equal(gram_schmidt(np.eye(3)), np.eye(3))

    def test_scaled_identity(self):
        np.testing.assert_allclose(gram_schmidt(2 * np.eye(4)), np.eye(4), atol=0)

    def test_random_gaussian(self):
        rng = create_rng(12)
        q = gram_schmidt(rng.gaussian_vector(100).reshape(10, 10))
        assert orthonormality_error(q) < 1e-10

    def test_spans_same_columns(self):
        rng = create_rng(13)
        m = rng.gaussian_vector(25).reshape(5, 5)
        q = gram_schmidt(m)
        # Q^T M is upper triangular for Gram-Schmidt
        np.testing.assert_allclose(np.tril(q.T @ m, -1), 0, atol=1e-12)

    def test_singular(self):
        m = np.array([[1.0, 2.0], [2.0, 4.0]])
        with pytest.raises(SingularMatrixError):
            gram_schmidt(m)
        with pytest.raises(SingularMatrixError):
            gram_schmidt(np.zeros((3, 3)))

    def test_not_square(self):
        with pytest.raises(ValueError):
            gram_schmidt(np.ones((2, 3)))


class TestRandomOrthogonal:
    def test_one_dimensional(self):
        assert abs(random_orthogonal(create_rng(1), 1)[0, 0]) == 1.0

    def test_replay(self):
        assert np.array_equal(random_orthogonal(create_rng(5), 7), random_orthogonal(create_rng(5), 7))

    def test_is_gram_schmidt_of_row_major_gaussians(self):
        a, b = create_rng(6), create_rng(6)
        m = np.array([b.next_gaussian() for _ in range(16)]).reshape(4, 4)
        assert np.array_equal(random_orthogonal(a, 4), gram_schmidt(m))

    @pytest.mark.parametrize("d", [2, 5, 30])
    def test_determinant(self, d):
        assert abs(abs(np.linalg.det(random_orthogonal(create_rng(d), d))) - 1) < 1e-9


class TestRotateUpdate:
    def test_zero_angle_keeps_matrix(self):
        rng = create_rng(1)
        r = random_orthogonal(rng, 4)
        np.testing.assert_allclose(rotate_update(r, 0.0, rng), r, atol=0)

    def test_two_dimensional(self):
        rng = create_rng(2)
        r = random_orthogonal(rng, 2)
        np.testing.assert_allclose(rotate_update(r, 0.4, rng), givens_matrix(2, PlanePair(0, 1), 0.4) @ r, atol=1e-15)

    def test_long_run_drift(self):
        rng = create_rng(3)
        r = random_orthogonal(rng, 3)
        for _ in range(1000):
            r = rotate_update(r, math.pi / 6, rng)
        assert orthonormality_error(r) <= 1e-9

    @pytest.mark.parametrize("d", [2, 4, 9])
    def test_consumes_one_permutation(self, d):
        rng, twin = create_rng(9), create_rng(9)
        rotate_update(np.eye(d), 0.3, rng)
        twin.next_permutation(d * (d - 1) // 2)
        assert rng.getstate() == twin.getstate()

    def test_uses_drawn_order(self):
        rng, twin = create_rng(4), create_rng(4)
        d = 4
        got = rotate_update(np.eye(d), 1.1, rng)
        pairs = plane_pairs(d)
        order = [pairs[i] for i in twin.next_permutation(len(pairs))]
        want = np.eye(d)
        for pair in order:
            want = want @ givens_matrix(d, pair, 1.1)
        np.testing.assert_allclose(got, want, atol=1e-12)
