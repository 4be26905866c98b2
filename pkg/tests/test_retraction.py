import numpy as np
import pytest

from alcp.driver import AlcpConfig, run
from alcp.manifold import feasibility, random_stiefel
from alcp.problems import eigenbasis, generate, nearest_point
from alcp.records import TRACE_FIELDS, Termination, armijo_violations, descent_violations, trace_to_string
from alcp.retraction import RankDeficient, qr_retraction, riemannian_grad, run_rgd


def tangent(rng, u):
    w = rng.standard_normal((u.shape[0], u.shape[0]))
    return (w - w.T) @ u


class TestRiemannianGrad:
    def test_gradient_equal_to_point(self):
        u = random_stiefel(10, 3, 0).data
        np.testing.assert_allclose(riemannian_grad(u, u).data, 0, atol=1e-15)

    def test_invariant_subspace(self, rng):
        x = rng.standard_normal((12, 12))
        a = x.T @ x
        _, vecs = np.linalg.eigh(a)
        u = vecs[:, -3:]
        g = eigenbasis(a).gradient(u)
        np.testing.assert_allclose(riemannian_grad(u, g).data, 0, atol=1e-10)

    def test_tangent(self, rng):
        for _ in range(20):
            u = random_stiefel(30, 5, rng).data
            assert riemannian_grad(u, rng.standard_normal((30, 5))).residual(u) <= 1e-9

    def test_canonical_pairing_matches_directional_derivative(self, rng):
        obj = generate("proc", 25, 3, 0).objective()
        u = random_stiefel(25, 3, 1).data
        grad = riemannian_grad(u, obj.gradient(u)).data
        h = 1e-6
        for _ in range(10):
            d = tangent(rng, u)
            d /= np.linalg.norm(d)
            # canonical metric <X, Y>_U = tr(X^T (I - U U^T / 2) Y)
            canon = np.trace(grad.T @ (d - 0.5 * u @ (u.T @ d)))
            fd = (obj.value(u + h * d) - obj.value(u - h * d)) / (2 * h)
            assert abs(canon - fd) <= 1e-6 * max(1.0, abs(fd))


class TestQrRetraction:
    def test_zero_direction(self):
        u = random_stiefel(10, 3, 0).data
        np.testing.assert_allclose(qr_retraction(u, np.zeros_like(u)).data, u, atol=1e-15)

    def test_single_column(self):
        t = 0.7
        r = qr_retraction(np.array([[1.0], [0.0]]), np.array([[0.0], [t]])).data
        np.testing.assert_allclose(r, np.array([[1.0], [t]]) / np.sqrt(1 + t**2), atol=1e-15)

    def test_first_order_agreement(self, rng):
        u = random_stiefel(20, 4, 0).data
        d = tangent(rng, u)
        errs = [np.linalg.norm(qr_retraction(u, tau * d).data - (u + tau * d)) for tau in (1e-3, 1e-4)]
        assert errs[1] < 1e-4 * np.linalg.norm(d)
        # quadratic decay: a tenfold smaller step cuts the error about a hundredfold
        assert errs[1] / errs[0] < 0.02

    def test_feasible(self, rng):
        for _ in range(20):
            u = random_stiefel(40, 6, rng).data
            assert feasibility(qr_retraction(u, 3 * tangent(rng, u)).data) <= 1e-9

    def test_rank_deficient(self):
        u = np.eye(3)[:, :2]
        with pytest.raises(RankDeficient):
            qr_retraction(u, -u)


class TestRunRgd:
    def test_start_at_minimizer(self):
        u0 = random_stiefel(15, 3, 0)
        res = run_rgd(nearest_point(u0), u0)
        assert res.record.itr == 0
        assert res.reason in (Termination.GRAD_TOL, Termination.EXACT_STATIONARY)

    def test_eigenbasis_optimum(self):
        inst = generate("eig", 100, 3, 1)
        res = run_rgd(inst.objective(), random_stiefel(100, 3, 2), AlcpConfig(rel_grad_tol=1e-8, max_iter=5000))
        top = np.sum(np.linalg.eigvalsh(inst.data["a"])[-3:])
        assert abs(-res.record.fval - top) <= 1e-6 * top

    def test_monotone_and_armijo(self):
        inst = generate("proc", 40, 4, 0)
        res = run_rgd(inst.objective(), random_stiefel(40, 4, 1), AlcpConfig(max_iter=200))
        assert not descent_violations(res.record.rows)
        assert not armijo_violations(res.record.rows)
        assert all(r.l == 0 for r in res.record.rows)
        assert res.record.change == 0

    def test_same_schema_as_alcp(self):
        inst = generate("eig", 20, 2, 0)
        u0 = random_stiefel(20, 2, 1)
        a = trace_to_string(run(inst.objective(), u0, AlcpConfig(max_iter=3)).record)
        b = trace_to_string(run_rgd(inst.objective(), u0, AlcpConfig(max_iter=3)).record)
        assert a.splitlines()[0] == b.splitlines()[0] == ",".join(TRACE_FIELDS)
