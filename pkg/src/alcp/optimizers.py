"""Armijo-type line-search engines on an abstract inner-product space.

The engines only add, scale and take inner products of iterates, so the same
code drives NumPy arrays and :class:`~alcp.manifold.SkewParam` coordinates.
An objective ``J`` is any object with ``value(x)`` and ``gradient(x)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Any, Callable

import numpy as np

STEP_MIN = 1e-20
STEP_MAX = 1e20
DIVISION_GUARD = 1e-300


class Kind(str, Enum):
    GD = "gd"
    CG_FR = "cg-fr"
    CG_HSPLUS = "cg-hs+"
    CG_HZ = "cg-hz"


class NotDescent(ValueError):
    pass


class LineSearchStalled(RuntimeError):
    pass


def array_inner(x, y) -> float:
    return float(np.vdot(x, y))


@dataclass(frozen=True)
class LineSearchConfig:
    c: float = 2.0**-13
    rho: float = 0.5
    max_halvings: int = 60

    def __post_init__(self):
        if not 0.0 < self.c < 1.0:
            raise ValueError(f"c must lie in (0, 1), got {self.c}")
        if not 0.0 < self.rho < 1.0:
            raise ValueError(f"rho must lie in (0, 1), got {self.rho}")
        if self.max_halvings < 1:
            raise ValueError("max_halvings must be positive")


@dataclass(frozen=True)
class StrategicInfo:
    """Memory an engine carries between steps of one segment.

    ``fresh`` is true right after (re)initialization, when no step has been
    taken in the current segment yet.
    """

    prev_direction: Any = None
    prev_gradient: Any = None
    prev_value: float = math.nan
    prev_stepsize: float = math.nan
    fresh: bool = True


@dataclass(frozen=True)
class LineSearchResult:
    gamma: float
    trial_count: int
    value: float
    x: Any


def backtracking(
    J: Callable[[Any], float],
    g_dot_d: float,
    x,
    d,
    gamma_init: float,
    cfg: LineSearchConfig = LineSearchConfig(),
    fx: float | None = None,
) -> LineSearchResult:
    """Shrink ``gamma`` by ``rho`` until the Armijo inequality holds.

    Accepts the first ``gamma = gamma_init * rho**k`` with
    ``J(x + gamma d) <= J(x) + c gamma <grad J(x), d>``. ``fx`` may pass a
    known ``J(x)`` to save an evaluation.
    """
    if not g_dot_d < 0.0:
        raise NotDescent(f"<grad, d> = {g_dot_d!r} is not negative")
    if not gamma_init > 0.0:
        raise ValueError(f"initial stepsize must be positive, got {gamma_init!r}")
    if fx is None:
        fx = J(x)
    gamma = gamma_init
    for k in range(cfg.max_halvings + 1):
        trial = x + gamma * d
        ft = J(trial)
        if ft <= fx + cfg.c * gamma * g_dot_d:
            return LineSearchResult(gamma, k + 1, ft, trial)
        gamma *= cfg.rho
    raise LineSearchStalled(f"no Armijo step after {cfg.max_halvings} halvings from {gamma_init:.3e}")


def initial_stepsize(info: StrategicInfo, current_value: float, g_dot_d: float, g_norm: float) -> float:
    """``1/||g||`` on a fresh segment, else ``4 (J_n - J_{n-1}) / <g_n, d_n>``."""
    if info.fresh:
        gamma = 1.0 / g_norm
    else:
        gamma = 4.0 * (current_value - info.prev_value) / g_dot_d
    if math.isnan(gamma):
        gamma = 1.0 / g_norm
    return min(max(gamma, STEP_MIN), STEP_MAX)


def _beta(kind: Kind, g_new, g, d, inner) -> float | None:
    """Conjugacy coefficient, or None when a denominator is degenerate."""
    if kind is Kind.CG_FR:
        den = inner(g, g)
        if abs(den) < DIVISION_GUARD:
            return None
        return inner(g_new, g_new) / den
    y = g_new - g
    dy = inner(d, y)
    if abs(dy) < DIVISION_GUARD:
        return None
    beta_hs = inner(g_new, y) / dy
    if kind is Kind.CG_HSPLUS:
        return max(beta_hs, 0.0)
    # Hager-Zhang with the zeta lower bound built on the previous gradient
    beta_hat = beta_hs - 2.0 * inner(y, y) * inner(d, g_new) / dy**2
    zden = math.sqrt(inner(d, d)) * min(0.01, math.sqrt(inner(g, g)))
    if zden < DIVISION_GUARD:
        return None
    return max(beta_hat, -1.0 / zden)


def next_direction(kind, g_new, info: StrategicInfo, inner=array_inner) -> tuple[Any, bool]:
    """Return ``(d, restarted)``.

    ``restarted`` is true when a CG candidate was replaced by ``-g_new``
    because it failed the descent test or hit a degenerate denominator.
    """
    kind = Kind(kind)
    if info.fresh or kind is Kind.GD:
        return -g_new, False
    beta = _beta(kind, g_new, info.prev_gradient, info.prev_direction, inner)
    if beta is None or not math.isfinite(beta):
        return -g_new, True
    d = -g_new + beta * info.prev_direction
    if not inner(g_new, d) < 0.0:
        return -g_new, True
    return d, False


@dataclass(frozen=True)
class StepResult:
    x_next: Any
    info_next: StrategicInfo
    stepsize: float
    fevals: int
    value: float
    value_next: float
    g_dot_d: float
    gamma_init: float
    restart: bool


def step(kind, J, x, info: StrategicInfo, cfg: LineSearchConfig = LineSearchConfig(), inner=array_inner) -> StepResult:
    """One update ``x + gamma d`` of a Type A engine.

    The direction comes from :func:`next_direction`, the stepsize from
    :func:`backtracking` started at :func:`initial_stepsize`.
    """
    fx = J.value(x)
    g = J.gradient(x)
    g_norm = math.sqrt(inner(g, g))
    if g_norm == 0.0:
        raise ValueError("step called at an exact stationary point")
    d, restart = next_direction(kind, g, info, inner)
    gd = inner(g, d)
    gamma0 = initial_stepsize(info, fx, gd, g_norm)
    ls = backtracking(J.value, gd, x, d, gamma0, cfg, fx=fx)
    info_next = replace(
        info,
        prev_direction=d,
        prev_gradient=g,
        prev_value=fx,
        prev_stepsize=ls.gamma,
        fresh=False,
    )
    return StepResult(ls.x, info_next, ls.gamma, ls.trial_count, fx, ls.value, gd, gamma0, restart)
