import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from alcp.manifold import (
    CenterPoint,
    NotOnManifold,
    ShapeMismatch,
    SkewParam,
    TangentVector,
    block_norms,
    feasibility,
    frobenius_inner,
    frobenius_norm,
    new_stiefel,
    random_stiefel,
    spectral_norm,
)

from conftest import random_param

dims = st.tuples(st.integers(1, 12), st.integers(0, 30)).map(lambda t: (t[0] + t[1], t[0]))


class TestNewStiefel:
    def test_identity_columns_are_valid(self):
        u = new_stiefel(np.eye(7)[:, :3])
        assert (u.N, u.p) == (7, 3)
        np.testing.assert_array_equal(u.up, np.eye(3))
        assert u.lo.shape == (4, 3)

    def test_all_ones_is_rejected(self):
        with pytest.raises(NotOnManifold):
            new_stiefel(np.ones((5, 2)))

    def test_qr_factor_of_gaussian_is_valid(self, rng):
        q, _ = np.linalg.qr(rng.standard_normal((40, 6)))
        u = new_stiefel(q)
        assert feasibility(u.data) < 1e-10

    def test_wide_matrix_is_rejected(self):
        with pytest.raises(NotOnManifold):
            new_stiefel(np.eye(3)[:2])

    def test_stored_data_is_read_only(self):
        u = new_stiefel(np.eye(4)[:, :2])
        with pytest.raises(ValueError):
            u.data[0, 0] = 2.0

    def test_vector_input_becomes_column(self):
        assert new_stiefel(np.array([0.0, 1.0])).p == 1


class TestRandomStiefel:
    def test_same_seed_same_matrix(self):
        np.testing.assert_array_equal(random_stiefel(10, 3, 42).data, random_stiefel(10, 3, 42).data)

    def test_different_seed_differs(self):
        assert not np.array_equal(random_stiefel(10, 3, 1).data, random_stiefel(10, 3, 2).data)

    def test_feasible(self):
        assert feasibility(random_stiefel(200, 20, 0).data) < 1e-10

    def test_one_by_one_is_unit(self):
        assert abs(random_stiefel(1, 1, 5).data[0, 0]) == pytest.approx(1.0, abs=1e-15)

    def test_matches_orthonormalized_uniform_draw(self):
        x = np.random.default_rng(3).random((8, 3))
        u = random_stiefel(8, 3, 3).data
        # same column space, and Q^T X is upper triangular with positive diagonal
        r = u.T @ x
        np.testing.assert_allclose(np.tril(r, -1), 0, atol=1e-12)
        assert np.all(np.diag(r) > 0)


class TestSkewParam:
    def test_a_is_skew_symmetrized(self, rng):
        v = SkewParam(rng.standard_normal((4, 4)), rng.standard_normal((3, 4)))
        np.testing.assert_array_equal(v.a, -v.a.T)

    def test_skew_input_is_kept_bitwise(self, rng):
        x = rng.standard_normal((5, 5))
        a = x - x.T
        np.testing.assert_array_equal(SkewParam(a, np.zeros((0, 5))).a, a)

    def test_shape_mismatch(self):
        with pytest.raises(ShapeMismatch):
            SkewParam(np.zeros((3, 3)), np.zeros((4, 2)))

    @settings(max_examples=40, deadline=None)
    @given(dims, st.integers(0, 2**32 - 1))
    def test_dense_is_exactly_skew(self, shape, seed):
        N, p = shape
        v = random_param(np.random.default_rng(seed), N, p)
        d = v.dense()
        np.testing.assert_array_equal(d, -d.T)
        np.testing.assert_array_equal(d[p:, p:], 0)
        back = SkewParam.from_dense(d, p)
        np.testing.assert_array_equal(back.a, v.a)
        np.testing.assert_array_equal(back.b, v.b)

    def test_vector_space_ops(self, rng):
        x, y = random_param(rng, 6, 2), random_param(rng, 6, 2)
        np.testing.assert_allclose((x + y - y).dense(), x.dense(), atol=1e-15)
        np.testing.assert_allclose((2.0 * x).dense(), 2 * x.dense())
        np.testing.assert_allclose((-x).dense(), -x.dense())
        z = SkewParam.zeros(6, 2)
        assert (z.N, z.p) == (6, 2)

    def test_empty_b_block(self):
        v = SkewParam(np.array([[0.0, 1.0], [-1.0, 0.0]]), np.zeros((0, 2)))
        assert v.N == 2
        assert block_norms(v) == (pytest.approx(1.0), 0.0)


class TestInnerProduct:
    def test_zero(self):
        z = SkewParam.zeros(5, 2)
        assert frobenius_inner(z, z) == 0.0

    def test_self_inner_is_weighted_sum(self, rng):
        v = random_param(rng, 9, 3)
        assert frobenius_inner(v, v) == pytest.approx(np.sum(v.a**2) + 2 * np.sum(v.b**2), rel=1e-14)

    def test_p1_unit_b(self):
        e1 = np.zeros((3, 1))
        e1[0] = 1.0
        v = SkewParam(np.zeros((1, 1)), e1)
        assert frobenius_inner(v, v) == 2.0

    def test_shape_mismatch(self):
        with pytest.raises(ShapeMismatch):
            frobenius_inner(SkewParam.zeros(5, 2), SkewParam.zeros(6, 2))

    @pytest.mark.parametrize("N,p", [(1, 1), (10, 3), (200, 20), (200, 200)])
    def test_matches_dense_trace(self, rng, N, p):
        x, y = random_param(rng, N, p), random_param(rng, N, p)
        dense = np.trace(x.dense().T @ y.dense())
        assert frobenius_inner(x, y) == pytest.approx(dense, rel=1e-12, abs=1e-12)
        assert frobenius_norm(x) == pytest.approx(np.linalg.norm(x.dense()), rel=1e-12)


class TestNorms:
    @settings(max_examples=40, deadline=None)
    @given(dims, st.integers(0, 2**32 - 1))
    def test_spectral_norm_matches_dense_and_triangle_bound(self, shape, seed):
        N, p = shape
        v = random_param(np.random.default_rng(seed), N, p)
        dense = np.linalg.norm(v.dense(), 2)
        assert spectral_norm(v) == pytest.approx(dense, rel=1e-10, abs=1e-12)
        na, nb = block_norms(v)
        assert dense <= na + nb + 1e-10

    def test_off_diagonal_block_alone_has_norm_of_b(self, rng):
        v = SkewParam(np.zeros((3, 3)), rng.standard_normal((7, 3)))
        assert np.linalg.norm(v.dense(), 2) == pytest.approx(np.linalg.norm(v.b, 2), rel=1e-12)

    def test_p1_block_norm_is_vector_norm(self):
        v = SkewParam(np.zeros((1, 1)), np.array([[3.0], [4.0]]))
        assert block_norms(v) == (0.0, pytest.approx(5.0))


class TestCenterPoint:
    def test_identity(self):
        c = CenterPoint.identity(5, 2)
        np.testing.assert_array_equal(c.dense(), np.eye(5))
        np.testing.assert_array_equal(c.left, np.eye(5)[:, :2])

    def test_rejects_non_orthogonal(self):
        with pytest.raises(NotOnManifold):
            CenterPoint(np.ones((2, 2)), 4)

    def test_dense_is_block_diagonal(self, rng):
        q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
        d = CenterPoint(q, 6).dense()
        np.testing.assert_array_equal(d[:3, :3], q)
        np.testing.assert_array_equal(d[3:, 3:], np.eye(3))
        np.testing.assert_array_equal(d[:3, 3:], 0)


class TestTangentVector:
    def test_residual_of_skew_times_u(self, rng):
        u = random_stiefel(8, 3, 1).data
        w = rng.standard_normal((8, 8))
        d = TangentVector((w - w.T) @ u)
        assert d.residual(u) < 1e-12

    def test_residual_detects_normal_component(self):
        u = np.eye(4)[:, :2]
        assert TangentVector(u.copy()).residual(u) > 1.0
