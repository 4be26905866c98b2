"""Riemannian gradient descent with the QR retraction, as a comparator.

Uses the same backtracking rule, initial stepsize and stopping test as the
Cayley driver and emits the same trace schema (with ``l`` fixed at 0).
"""

from __future__ import annotations

import numpy as np

from .cayley import EvalCounter
from .driver import EXACT_ZERO, FINAL_FEASIBILITY_TOL, AlcpConfig
from .manifold import StiefelPoint, TangentVector, as_array, feasibility, new_stiefel
from .optimizers import LineSearchStalled, StrategicInfo, backtracking, initial_stepsize
from .records import IterationRow, RunRecord, RunResult, Stopwatch, Termination

RANK_TOL = 1e-14


class RankDeficient(ArithmeticError):
    pass


def riemannian_grad(u, euclid_grad) -> TangentVector:
    """Gradient under the canonical metric: ``G - U G^T U``."""
    u = as_array(u)
    g = np.asarray(euclid_grad, dtype=float)
    return TangentVector(g - u @ (g.T @ u))


def _qr_positive(x: np.ndarray) -> np.ndarray:
    q, r = np.linalg.qr(x)
    d = np.diag(r)
    if np.any(np.abs(d) < RANK_TOL):
        raise RankDeficient(f"U + D is rank deficient (min |R_ii| = {np.min(np.abs(d)):.3e})")
    return q * np.sign(d)


def qr_retraction(u, d) -> StiefelPoint:
    """Q-factor of ``U + D`` with the sign convention ``diag(R) > 0``."""
    u = as_array(u)
    d = d.data if isinstance(d, TangentVector) else np.asarray(d, dtype=float)
    return new_stiefel(_qr_positive(u + d), tol=1e-9)


def run_rgd(objective, u0, cfg: AlcpConfig = AlcpConfig()) -> RunResult:
    """Gradient descent ``U_{n+1} = R_{U_n}(-gamma_n grad f(U_n))``.

    Backtracking acts on ``gamma -> f(R_U(gamma D))`` with the exact slope
    ``Df(U)[D] = <G, D>``. Only ``cfg.rel_grad_tol``, ``cfg.max_iter`` and
    ``cfg.line_search`` are used.
    """
    clock = Stopwatch()
    clock.start()
    counter = EvalCounter()
    u = as_array(u0).copy()
    f = float(objective.value(u))
    counter.values += 1
    info = StrategicInfo()
    record = RunRecord()
    n = 0
    g0_norm = None

    while True:
        g = np.asarray(objective.gradient(u), dtype=float)
        counter.gradients += 1
        rg = riemannian_grad(u, g).data
        g_norm = float(np.linalg.norm(rg))
        if g0_norm is None:
            g0_norm = g_norm
        clock.stop()
        row = IterationRow(n=n, l=0, f=f, grad_norm=g_norm, feasibility=feasibility(u), elapsed=clock.elapsed)
        record.rows.append(row)
        clock.start()

        if g_norm < EXACT_ZERO:
            reason = Termination.EXACT_STATIONARY
            break
        if g_norm / g0_norm < cfg.rel_grad_tol:
            reason = Termination.GRAD_TOL
            break
        if n >= cfg.max_iter:
            reason = Termination.MAX_ITER
            break

        d = -rg
        gd = float(np.vdot(g, d))
        gamma0 = initial_stepsize(info, f, gd, g_norm)
        trial_points = {}

        def J(xi, base=u):
            q = _qr_positive(base + xi)
            trial_points["last"] = q
            counter.values += 1
            return float(objective.value(q))

        try:
            ls = backtracking(J, gd, np.zeros_like(u), d, gamma0, cfg.line_search, fx=f)
        except LineSearchStalled:
            reason = Termination.LINE_SEARCH_STALLED
            break
        row.stepsize = ls.gamma
        row.gamma_init = gamma0
        row.trials = ls.trial_count
        row.g_dot_d = gd
        row.f_next = ls.value
        info = StrategicInfo(prev_direction=d, prev_gradient=rg, prev_value=f, prev_stepsize=ls.gamma, fresh=False)
        u = trial_points["last"]
        f = ls.value
        n += 1

    clock.stop()
    record.time = clock.elapsed
    record.nfe = counter.total
    return RunResult(new_stiefel(u, tol=FINAL_FEASIBILITY_TOL), None, None, reason, record)
