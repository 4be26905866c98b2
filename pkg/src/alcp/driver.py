"""Adaptive localized Cayley parametrization.

A Type A engine minimizes ``f o Phi_S^{-1}`` over the Cayley coordinates of
the current center. After every step the surrogate alarm
``||A||_2 + ||B||_2 > T`` is tested on the new coordinates; when it fires the
center is re-chosen at the new iterate, the iterate is re-expressed in the new
coordinates (where its norm is at most 1) and the engine's memory is reset.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum

from .cayley import EvalCounter, forward, parametrize
from .center import choose_center
from .manifold import CenterPoint, SkewParam, as_array, block_norms, feasibility, frobenius_inner, new_stiefel, spectral_norm
from .optimizers import Kind, LineSearchConfig, LineSearchStalled, StrategicInfo, step
from .records import IterationRow, RunRecord, RunResult, Stopwatch, Termination

EXACT_ZERO = 1e-300
FINAL_FEASIBILITY_TOL = 1e-9


class AlarmMode(str, Enum):
    STANDARD = "standard"
    NEVER = "never"


@dataclass(frozen=True)
class AlcpConfig:
    alarm_threshold: float = 1.5
    rel_grad_tol: float = 1e-5
    max_iter: int = 2000
    engine: Kind = Kind.GD
    line_search: LineSearchConfig = field(default_factory=LineSearchConfig)
    alarm_mode: AlarmMode = AlarmMode.STANDARD

    def __post_init__(self):
        object.__setattr__(self, "engine", Kind(self.engine))
        object.__setattr__(self, "alarm_mode", AlarmMode(self.alarm_mode))
        if not self.alarm_threshold > 0:
            raise ValueError("alarm threshold must be positive")
        if self.max_iter < 0:
            raise ValueError("max_iter must be nonnegative")


def alarming(v: SkewParam, threshold: float) -> bool:
    na, nb = block_norms(v)
    return na + nb > threshold


def run(objective, u0, cfg: AlcpConfig = AlcpConfig(), center: CenterPoint | None = None) -> RunResult:
    """Minimize ``objective`` over St(p, N) starting from ``u0``.

    ``center`` overrides the initial center, which otherwise comes from
    :func:`~alcp.center.choose_center`. The relative gradient test always
    divides by the gradient norm at the very first iterate.
    """
    u0 = as_array(u0)
    clock = Stopwatch()
    clock.start()
    counter = EvalCounter()
    s = choose_center(u0) if center is None else center
    J = parametrize(s, objective, counter)
    v = forward(s, u0)
    J.seed(v, u0)
    info = StrategicInfo()
    record = RunRecord()
    n = l = 0
    g0_norm = None
    changed = False
    standard = cfg.alarm_mode is AlarmMode.STANDARD

    while True:
        f = J.value(v)
        g = J.gradient(v)
        g_norm = math.sqrt(frobenius_inner(g, g))
        if g0_norm is None:
            g0_norm = g_norm
        clock.stop()
        u = J.point(v)
        row = IterationRow(
            n=n,
            l=l,
            f=f,
            grad_norm=g_norm,
            feasibility=feasibility(u),
            vnorm=spectral_norm(v),
            alarm_norm=sum(block_norms(v)),
            center_changed=changed,
            elapsed=clock.elapsed,
        )
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
        try:
            res = step(cfg.engine, J, v, info, cfg.line_search, frobenius_inner)
        except LineSearchStalled:
            reason = Termination.LINE_SEARCH_STALLED
            break
        row.stepsize = res.stepsize
        row.gamma_init = res.gamma_init
        row.trials = res.fevals
        row.g_dot_d = res.g_dot_d
        row.f_next = res.value_next
        row.restart = res.restart

        v_tilde = res.x_next
        changed = standard and alarming(v_tilde, cfg.alarm_threshold)
        if changed:
            u_next = J.point(v_tilde)
            s = choose_center(u_next)
            v = forward(s, u_next)
            J = parametrize(s, objective, counter)
            # keep the exact iterate and its value across the switch
            J.seed(v, u_next, res.value_next)
            info = StrategicInfo()
            l += 1
        else:
            v = v_tilde
            info = res.info_next
        n += 1

    clock.stop()
    record.time = clock.elapsed
    record.nfe = counter.total
    point = new_stiefel(J.point(v), tol=FINAL_FEASIBILITY_TOL)
    return RunResult(point, v, s, reason, record)


def run_naive_cp(objective, u0, center: CenterPoint, cfg: AlcpConfig = AlcpConfig()) -> RunResult:
    """Fixed-center Cayley parametrization: the alarm never fires.

    Raises :class:`~alcp.cayley.SingularPoint` if ``u0`` is singular for
    ``center``.
    """
    return run(objective, u0, replace(cfg, alarm_mode=AlarmMode.NEVER), center=center)
