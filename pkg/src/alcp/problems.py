"""Test objectives on St(p, N) and seeded instance generators."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Callable

import numpy as np

from .manifold import StiefelPoint, as_array, new_stiefel, random_stiefel

TOY_ANGLE = 127 * np.pi / 128


@dataclass(frozen=True)
class Objective:
    """A differentiable ``f: R^{N x p} -> R`` with its Euclidean gradient."""

    value: Callable[[np.ndarray], float]
    gradient: Callable[[np.ndarray], np.ndarray]
    name: str = ""


def nearest_point(target) -> Objective:
    """``f(U) = 0.5 ||U - U*||_F^2``."""
    target = as_array(target).copy()

    def value(u):
        r = u - target
        return 0.5 * float(np.vdot(r, r))

    def gradient(u):
        return u - target

    return Objective(value, gradient, "nearest_point")


def toy_target(N: int, p: int) -> StiefelPoint:
    """First p columns of ``diag(R(127 pi / 128), I_{N-2})``.

    This point is nearly singular for the identity center:
    ``det(I_p + U*_up) = 2^{p-1} (1 + cos(127 pi / 128))``.
    """
    if N < 2:
        raise ValueError("toy target needs N >= 2")
    if p > N:
        raise ValueError(f"need p <= N, got p={p}, N={N}")
    c, s = np.cos(TOY_ANGLE), np.sin(TOY_ANGLE)
    full = np.eye(N)[:, :p].copy()
    full[:2, 0] = [c, s]
    if p >= 2:
        full[:2, 1] = [-s, c]
    return new_stiefel(full)


def eigenbasis(a) -> Objective:
    """``f(U) = -trace(U^T A U)``; the input is symmetrized."""
    a = np.asarray(a, dtype=float)
    a = 0.5 * (a + a.T)

    def value(u):
        return -float(np.vdot(u, a @ u))

    def gradient(u):
        return -2.0 * (a @ u)

    return Objective(value, gradient, "eigenbasis")


def procrustes(b, c) -> Objective:
    """``f(U) = ||B U - C||_F^2``."""
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    if b.shape[0] != c.shape[0]:
        raise ValueError(f"B has {b.shape[0]} rows but C has {c.shape[0]}")

    def value(u):
        r = b @ u - c
        return float(np.vdot(r, r))

    def gradient(u):
        return 2.0 * (b.T @ (b @ u - c))

    return Objective(value, gradient, "procrustes")


class ProblemKind(str, Enum):
    TOY = "toy"
    EIG = "eig"
    PROC = "proc"


@dataclass(frozen=True, eq=False)
class ProblemInstance:
    """Data defining one objective, plus how it was generated.

    ``data`` holds ``target`` (toy), ``a`` (eig) or ``b``, ``c``, ``target``
    (proc).
    """

    kind: ProblemKind
    N: int
    p: int
    data: dict = field(default_factory=dict)
    seed: int | None = None

    def objective(self) -> Objective:
        if self.kind is ProblemKind.TOY:
            return nearest_point(self.data["target"])
        if self.kind is ProblemKind.EIG:
            return eigenbasis(self.data["a"])
        return procrustes(self.data["b"], self.data["c"])

    @cached_property
    def optimal_value(self) -> float:
        """Global minimum of the objective."""
        if self.kind is ProblemKind.EIG:
            w = np.linalg.eigvalsh(self.data["a"])
            return -float(np.sum(w[-self.p :]))
        return 0.0


def generate(kind, N: int, p: int, seed=None) -> ProblemInstance:
    """Build a random instance.

    ``eig`` uses ``A = X^T X`` with standard normal ``X`` (N x N); ``proc``
    uses a standard normal ``B`` (N x N), ``U*`` from :func:`random_stiefel`
    and ``C = B U*``. ``toy`` is deterministic and ignores the seed.
    """
    kind = ProblemKind(kind)
    if N < p:
        raise ValueError(f"need N >= p, got N={N}, p={p}")
    rng = np.random.default_rng(seed)
    int_seed = seed if isinstance(seed, (int, np.integer)) else None
    if kind is ProblemKind.TOY:
        data = {"target": toy_target(N, p).data}
    elif kind is ProblemKind.EIG:
        x = rng.standard_normal((N, N))
        data = {"a": x.T @ x}
    else:
        b = rng.standard_normal((N, N))
        target = random_stiefel(N, p, rng).data
        data = {"b": b, "c": b @ target, "target": target}
    return ProblemInstance(kind, N, p, data, int_seed)


def dump_instance(inst: ProblemInstance, path) -> None:
    """Write an instance as ``.npz``: one row-major float64 array per matrix
    plus a JSON header with kind, shape and seed."""
    header = json.dumps({"kind": inst.kind.value, "N": inst.N, "p": inst.p, "seed": inst.seed})
    arrays = {k: np.ascontiguousarray(v, dtype=np.float64) for k, v in inst.data.items()}
    with open(path, "wb") as fh:
        np.savez(fh, header=np.array(header), **arrays)


def load_instance(path) -> ProblemInstance:
    with np.load(path, allow_pickle=False) as z:
        meta = json.loads(str(z["header"]))
        data = {k: z[k].copy() for k in z.files if k != "header"}
    return ProblemInstance(ProblemKind(meta["kind"]), meta["N"], meta["p"], data, meta["seed"])
