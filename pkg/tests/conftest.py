"""Shared fixtures and a dense reference implementation of the Cayley pair.

The reference works with an arbitrary orthogonal ``S`` (N x N) and full N x N
matrices, so it shares no code with the structured O(Np^2) implementation.
"""

import numpy as np
import pytest

from alcp.manifold import CenterPoint, SkewParam


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def random_center(rng, N, p) -> CenterPoint:
    q, _ = np.linalg.qr(rng.standard_normal((p, p)))
    return CenterPoint(q, N)


def random_param(rng, N, p, scale=1.0) -> SkewParam:
    return SkewParam(scale * rng.standard_normal((p, p)), scale * rng.standard_normal((N - p, p)))


def unit_param(rng, N, p) -> SkewParam:
    e = random_param(rng, N, p)
    return e * (1.0 / np.sqrt(np.sum(e.a**2) + 2 * np.sum(e.b**2)))


def dense_inverse(s: np.ndarray, v: np.ndarray, p: int) -> np.ndarray:
    """``S (I - V)(I + V)^{-1}`` restricted to the first p columns."""
    n = s.shape[0]
    eye = np.eye(n)
    return (s @ (eye - v) @ np.linalg.inv(eye + v))[:, :p]


def dense_forward(s: np.ndarray, u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """A and B blocks for a general orthogonal center ``S``."""
    p = u.shape[1]
    s_le, s_ri = s[:, :p], s[:, p:]
    kinv = np.linalg.inv(np.eye(p) + s_le.T @ u)
    w = u.T @ s_le
    a = 2 * kinv.T @ ((w - w.T) / 2) @ kinv
    b = -s_ri.T @ u @ kinv
    return a, b


def dense_pullback(s: np.ndarray, v: np.ndarray, g: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray]:
    """Gradient of ``V -> f(S (I-V)(I+V)^{-1} I_{N x p})`` in the trace metric.

    The differential of the inverse map along E is
    ``-2 S X E X I_{N x p}`` with ``X = (I + V)^{-1}``; its adjoint gives a
    full matrix Z, which is projected onto the structured skew space.
    """
    n = s.shape[0]
    x = np.linalg.inv(np.eye(n) + v)
    j = np.eye(n)[:, :p]
    z = -2 * x.T @ s.T @ g @ j.T @ x.T
    a = (z[:p, :p] - z[:p, :p].T) / 2
    b = (z[p:, :p] - z[:p, p:].T) / 2
    return a, b


def fd_directional(fun, x, e, h=1e-6) -> float:
    return (fun(x + h * e) - fun(x - h * e)) / (2 * h)
