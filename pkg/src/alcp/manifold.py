"""Matrix-shaped domain types shared by every other module.

Points of St(p, N) are N x p matrices with orthonormal columns. The Cayley
parameter space Q_{N,p} holds skew-symmetric N x N matrices of the block form

    V = [[A, -B^T],
         [B,  0  ]]

with A (p x p) skew and B ((N-p) x p) arbitrary. Only the pair (A, B) is ever
stored; every operation on it costs O(N p^2).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

FEASIBILITY_TOL = 1e-10


class NotOnManifold(ValueError):
    """Raised when a matrix fails the orthonormal-columns check."""


class ShapeMismatch(ValueError):
    pass


def feasibility(u: np.ndarray) -> float:
    """Return ``||I_p - U^T U||_F``."""
    u = np.asarray(u)
    p = u.shape[1]
    return float(np.linalg.norm(np.eye(p) - u.T @ u))


@dataclass(frozen=True, eq=False)
class StiefelPoint:
    """An N x p matrix with orthonormal columns.

    Use :func:`new_stiefel` to build one from a raw array; it validates the
    constraint residual.
    """

    data: np.ndarray

    @property
    def N(self) -> int:
        return self.data.shape[0]

    @property
    def p(self) -> int:
        return self.data.shape[1]

    @property
    def up(self) -> np.ndarray:
        """Upper p x p block."""
        return self.data[: self.p]

    @property
    def lo(self) -> np.ndarray:
        """Lower (N-p) x p block."""
        return self.data[self.p :]

    def __array__(self, dtype=None, copy=None):
        return self.data if dtype is None else self.data.astype(dtype)


def new_stiefel(data, tol: float = FEASIBILITY_TOL) -> StiefelPoint:
    """Validate ``data`` and wrap it as a :class:`StiefelPoint`.

    Raises
    ------
    NotOnManifold
        If the array is not a 2-D N x p matrix with ``N >= p >= 1`` or its
        constraint residual exceeds ``tol``.
    """
    u = np.array(data, dtype=float)
    if u.ndim == 1:
        u = u[:, None]
    if u.ndim != 2:
        raise NotOnManifold(f"expected a 2-D matrix, got shape {u.shape}")
    N, p = u.shape
    if not N >= p >= 1:
        raise NotOnManifold(f"need N >= p >= 1, got N={N}, p={p}")
    res = feasibility(u)
    if not res <= tol:
        raise NotOnManifold(f"||I - U^T U||_F = {res:.3e} exceeds {tol:.1e}")
    u.setflags(write=False)
    return StiefelPoint(u)


def as_array(u) -> np.ndarray:
    if isinstance(u, StiefelPoint):
        return u.data
    return np.asarray(u, dtype=float)


def random_stiefel(N: int, p: int, seed=None) -> StiefelPoint:
    """Random point drawn as the orthonormalized uniform [0, 1) matrix.

    ``seed`` is anything :func:`numpy.random.default_rng` accepts. The QR
    factor is sign-fixed so that ``diag(R) > 0``, which makes the output a
    deterministic function of the drawn matrix.
    """
    if N < p:
        raise ValueError(f"need N >= p, got N={N}, p={p}")
    rng = np.random.default_rng(seed)
    x = rng.random((N, p))
    q, r = np.linalg.qr(x)
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    return new_stiefel(q * signs)


def _skew(a: np.ndarray) -> np.ndarray:
    # Exact on already-skew input: a - a.T == 2a bitwise, halving is exact.
    return 0.5 * (a - a.T)


@dataclass(frozen=True, eq=False)
class SkewParam:
    """The (A, B) blocks of a matrix in Q_{N,p}.

    Supports the vector-space operations the line-search engines need
    (``+``, ``-``, scalar ``*``, unary ``-``). ``A`` is skew-symmetrized on
    construction.
    """

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        b = np.asarray(self.b, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ShapeMismatch(f"A block must be square, got {a.shape}")
        if b.ndim != 2 or b.shape[1] != a.shape[0]:
            raise ShapeMismatch(f"B block must be (N-p) x {a.shape[0]}, got {b.shape}")
        object.__setattr__(self, "a", _skew(a))
        object.__setattr__(self, "b", b)

    @classmethod
    def zeros(cls, N: int, p: int) -> SkewParam:
        return cls(np.zeros((p, p)), np.zeros((N - p, p)))

    @property
    def p(self) -> int:
        return self.a.shape[0]

    @property
    def N(self) -> int:
        return self.a.shape[0] + self.b.shape[0]

    def __add__(self, other: SkewParam) -> SkewParam:
        return SkewParam(self.a + other.a, self.b + other.b)

    def __sub__(self, other: SkewParam) -> SkewParam:
        return SkewParam(self.a - other.a, self.b - other.b)

    def __mul__(self, scalar) -> SkewParam:
        return SkewParam(scalar * self.a, scalar * self.b)

    __rmul__ = __mul__

    def __neg__(self) -> SkewParam:
        return SkewParam(-self.a, -self.b)

    def dense(self) -> np.ndarray:
        """Materialize the full N x N matrix (tests and diagnostics only)."""
        p, N = self.p, self.N
        v = np.zeros((N, N))
        v[:p, :p] = self.a
        v[p:, :p] = self.b
        v[:p, p:] = -self.b.T
        return v

    @classmethod
    def from_dense(cls, v: np.ndarray, p: int) -> SkewParam:
        v = np.asarray(v, dtype=float)
        return cls(v[:p, :p], v[p:, :p])


def frobenius_inner(x: SkewParam, y: SkewParam) -> float:
    """``trace(V1^T V2)`` of the materialized matrices, computed blockwise."""
    if x.a.shape != y.a.shape or x.b.shape != y.b.shape:
        raise ShapeMismatch(f"blocks differ: {x.a.shape}/{x.b.shape} vs {y.a.shape}/{y.b.shape}")
    return float(np.vdot(x.a, y.a) + 2.0 * np.vdot(x.b, y.b))


def frobenius_norm(x: SkewParam) -> float:
    return float(np.sqrt(frobenius_inner(x, x)))


def block_norms(v: SkewParam) -> tuple[float, float]:
    """Spectral norms ``(||A||_2, ||B||_2)``; an empty block has norm 0."""
    na = float(np.linalg.norm(v.a, 2)) if v.a.size else 0.0
    nb = float(np.linalg.norm(v.b, 2)) if v.b.size else 0.0
    return na, nb


def spectral_norm(v: SkewParam) -> float:
    """Exact ``||V||_2`` of the materialized matrix in O(N p^2).

    With the thin QR ``B = Q R``, V vanishes on the orthogonal complement of
    ``span(e_1..e_p) + range(Q)``, and on that subspace it acts as the small
    skew matrix ``[[A, -R^T], [R, 0]]``.
    """
    if v.b.size == 0:
        return float(np.linalg.norm(v.a, 2)) if v.a.size else 0.0
    r = np.linalg.qr(v.b, mode="r")
    k = r.shape[0]
    p = v.p
    small = np.zeros((p + k, p + k))
    small[:p, :p] = v.a
    small[p:, :p] = r
    small[:p, p:] = -r.T
    return float(np.linalg.norm(small, 2))


@dataclass(frozen=True, eq=False)
class CenterPoint:
    """Center ``S = diag(t, I_{N-p})`` with ``t`` orthogonal p x p.

    ``S_le = [t; 0]`` and ``S_ri = [0; I]`` are implied and never formed.
    """

    t: np.ndarray
    N: int

    def __post_init__(self):
        t = np.array(self.t, dtype=float)
        if t.ndim != 2 or t.shape[0] != t.shape[1]:
            raise ShapeMismatch(f"t must be square, got {t.shape}")
        if t.shape[0] > self.N:
            raise ShapeMismatch(f"p={t.shape[0]} exceeds N={self.N}")
        res = feasibility(t)
        if not res <= FEASIBILITY_TOL:
            raise NotOnManifold(f"center block not orthogonal: residual {res:.3e}")
        t.setflags(write=False)
        object.__setattr__(self, "t", t)

    @classmethod
    def identity(cls, N: int, p: int) -> CenterPoint:
        return cls(np.eye(p), N)

    @property
    def p(self) -> int:
        return self.t.shape[0]

    @property
    def left(self) -> np.ndarray:
        """``S_le`` as an N x p array."""
        out = np.zeros((self.N, self.p))
        out[: self.p] = self.t
        return out

    def dense(self) -> np.ndarray:
        s = np.eye(self.N)
        s[: self.p, : self.p] = self.t
        return s


@dataclass(frozen=True, eq=False)
class TangentVector:
    """An N x p direction ``D`` at base point ``U`` with ``U^T D`` skew."""

    data: np.ndarray

    def residual(self, base) -> float:
        u = as_array(base)
        x = u.T @ self.data
        return float(np.linalg.norm(x + x.T))
