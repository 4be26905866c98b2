"""Generalized Cayley transform for centers ``S = diag(t, I)``.

All routines here work on the (A, B) blocks and the p x p block ``t`` of the
center, so ``forward``, ``inverse`` and ``pullback_gradient`` each cost
O(N p^2 + p^3).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .manifold import (
    CenterPoint,
    ShapeMismatch,
    SkewParam,
    StiefelPoint,
    as_array,
    new_stiefel,
)

# Reciprocal condition number of I_p + t^T U_up below which U is treated as
# lying on the singular-point set.
SINGULAR_RCOND = 1e-14
INVERSE_FEASIBILITY_TOL = 1e-9


class SingularPoint(ArithmeticError):
    """``det(I_p + S_le^T U)`` is (numerically) zero."""


class LinearSolveFailure(ArithmeticError):
    pass


class EmptyBlock(ValueError):
    pass


def singular_factor(center: CenterPoint, u) -> np.ndarray:
    """The p x p matrix ``I_p + S_le^T U`` whose determinant defines E_{N,p}(S)."""
    u = as_array(u)
    p = center.p
    return np.eye(p) + center.t.T @ u[:p]


def forward(center: CenterPoint, u) -> SkewParam:
    """Map a Stiefel point to its Cayley coordinates ``Phi_S(U)``.

    Raises
    ------
    SingularPoint
        If ``I_p + t^T U_up`` has reciprocal condition number below 1e-14.
    """
    u = as_array(u)
    p = center.p
    if u.shape != (center.N, p):
        raise ShapeMismatch(f"point shape {u.shape} does not match center ({center.N}, {p})")
    k = singular_factor(center, u)
    cond = np.linalg.cond(k)
    if not np.isfinite(cond) or 1.0 / cond < SINGULAR_RCOND:
        raise SingularPoint(f"I_p + t^T U_up is singular (cond={cond:.3e})")
    kinv = np.linalg.inv(k)
    w = u[:p].T @ center.t
    a = 2.0 * kinv.T @ (0.5 * (w - w.T)) @ kinv
    b = -u[p:] @ kinv
    return SkewParam(a, b)


def schur_matrix(v: SkewParam) -> np.ndarray:
    """``M = I_p + A + B^T B``, the Schur complement of ``I + V``."""
    return np.eye(v.p) + v.a + v.b.T @ v.b


def _solve_inverse(t: np.ndarray, v: SkewParam) -> tuple[np.ndarray, np.ndarray]:
    m = schur_matrix(v)
    try:
        minv = np.linalg.solve(m, np.eye(v.p))
    except np.linalg.LinAlgError as exc:
        # The symmetric part of M is I + B^T B >= I, so this is a bug.
        raise LinearSolveFailure(str(exc)) from exc
    u = np.empty((v.N, v.p))
    u[: v.p] = t @ (2.0 * minv - np.eye(v.p))
    u[v.p :] = -2.0 * v.b @ minv
    return u, minv


def inverse(center: CenterPoint, v: SkewParam) -> StiefelPoint:
    """``Phi_S^{-1}(V) = 2 (S_le - S_ri B) M^{-1} - S_le``."""
    if v.p != center.p or v.N != center.N:
        raise ShapeMismatch(f"parameter ({v.N}, {v.p}) does not match center ({center.N}, {center.p})")
    u, _ = _solve_inverse(center.t, v)
    return new_stiefel(u, tol=INVERSE_FEASIBILITY_TOL)


def _pullback(t, v: SkewParam, g: np.ndarray, minv: np.ndarray) -> SkewParam:
    p = v.p
    g_up, g_lo = g[:p], g[p:]
    k = g_up.T @ t - g_lo.T @ v.b
    w11 = minv @ k @ minv
    # W21 - W12^T with W21 = -B W11 and W12 = M^{-1}(K M^{-1} B^T + G_lo^T)
    b_grad = -v.b @ w11 - (v.b @ (minv.T @ k.T) + g_lo) @ minv.T
    return SkewParam(w11 - w11.T, b_grad)


def pullback_gradient(center: CenterPoint, v: SkewParam, euclid_grad) -> SkewParam:
    """Gradient of ``f o Phi_S^{-1}`` at ``V`` under the trace inner product.

    ``euclid_grad`` is the Euclidean gradient of ``f`` evaluated at
    ``U = inverse(center, v)``.
    """
    g = np.asarray(euclid_grad, dtype=float)
    if g.shape != (v.N, v.p):
        raise ShapeMismatch(f"gradient shape {g.shape} != ({v.N}, {v.p})")
    _, minv = _solve_inverse(center.t, v)
    return _pullback(center.t, v, g, minv)


def mobility(v: SkewParam) -> float:
    """Upper rate of change of ``Phi_S^{-1}`` at ``V`` per unit Frobenius step.

    Equals ``2 sqrt(1 + ||B||_2^2) / (1 + sigma_min(B)^2)``. When B has fewer
    rows than columns its smallest singular value is taken as 0.
    """
    if v.b.shape[0] == 0:
        raise EmptyBlock("mobility needs p < N")
    s = np.linalg.svd(v.b, compute_uv=False)
    smax = s[0]
    smin = s[-1] if v.b.shape[0] >= v.b.shape[1] else 0.0
    return float(2.0 * np.sqrt(1.0 + smax**2) / (1.0 + smin**2))


@dataclass
class EvalCounter:
    """Per-run tallies of objective and gradient evaluations."""

    values: int = 0
    gradients: int = 0

    @property
    def total(self) -> int:
        return self.values + self.gradients


@dataclass
class _Entry:
    v: SkewParam
    u: np.ndarray
    minv: np.ndarray | None
    f: float | None = None
    egrad: np.ndarray | None = None
    grad: SkewParam | None = None


def _same(x: SkewParam, y: SkewParam) -> bool:
    if x is y:
        return True
    return (
        x.a.shape == y.a.shape
        and x.b.shape == y.b.shape
        and np.array_equal(x.a, y.a)
        and np.array_equal(x.b, y.b)
    )


@dataclass
class ParametrizedObjective:
    """``f_S = f o Phi_S^{-1}`` with a one-entry cache.

    The cached point is shared between :meth:`value`, :meth:`gradient` and
    :meth:`point`, so a line search that ends on an accepted trial reuses
    its inverse solve and objective value.
    """

    center: CenterPoint
    objective: object
    counter: EvalCounter = field(default_factory=EvalCounter)
    _entry: _Entry | None = field(default=None, repr=False)

    def _lookup(self, v: SkewParam) -> _Entry:
        e = self._entry
        if e is not None and _same(e.v, v):
            return e
        u, minv = _solve_inverse(self.center.t, v)
        e = self._entry = _Entry(v, u, minv)
        return e

    def seed(self, v: SkewParam, u: np.ndarray, f: float | None = None, egrad=None) -> None:
        """Prime the cache with a known point ``U`` whose coordinates are ``v``.

        Used at a center switch so that the iterate keeps the exact ``U`` it
        had before re-parametrization.
        """
        self._entry = _Entry(v, np.asarray(u, dtype=float), None, f, egrad)

    def point(self, v: SkewParam) -> np.ndarray:
        return self._lookup(v).u

    def value(self, v: SkewParam) -> float:
        e = self._lookup(v)
        if e.f is None:
            e.f = float(self.objective.value(e.u))
            self.counter.values += 1
        return e.f

    def euclidean_gradient(self, v: SkewParam) -> np.ndarray:
        e = self._lookup(v)
        if e.egrad is None:
            e.egrad = np.asarray(self.objective.gradient(e.u), dtype=float)
            self.counter.gradients += 1
        return e.egrad

    def gradient(self, v: SkewParam) -> SkewParam:
        e = self._lookup(v)
        if e.grad is None:
            g = self.euclidean_gradient(v)
            if e.minv is None:
                _, e.minv = _solve_inverse(self.center.t, v)
            e.grad = _pullback(self.center.t, v, g, e.minv)
        return e.grad


def parametrize(center: CenterPoint, objective, counter: EvalCounter | None = None) -> ParametrizedObjective:
    return ParametrizedObjective(center, objective, counter if counter is not None else EvalCounter())
