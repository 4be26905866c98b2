"""Per-iteration traces, run results and their CSV form."""

from __future__ import annotations

import csv
import io
import math
import time
from dataclasses import dataclass, field, fields
from enum import Enum

from .manifold import CenterPoint, SkewParam, StiefelPoint


class Termination(str, Enum):
    GRAD_TOL = "GradTol"
    MAX_ITER = "MaxIter"
    EXACT_STATIONARY = "ExactStationary"
    LINE_SEARCH_STALLED = "LineSearchStalled"


@dataclass
class IterationRow:
    """State at iterate ``n`` and the step taken from it.

    ``f_next`` is the accepted line-search value ``J(x_n + stepsize d_n)``
    and ``g_dot_d`` the slope ``<grad J(x_n), d_n>``; together with ``f`` and
    ``stepsize`` they make every Armijo test replayable. On the final row no
    step is taken and those fields are NaN. ``center_changed`` marks the first
    row of a new center; ``vnorm`` and ``alarm_norm`` are ``||V_n||_2`` and
    ``||A||_2 + ||B||_2`` (NaN for the retraction baseline).
    """

    n: int
    l: int
    f: float
    grad_norm: float
    stepsize: float = math.nan
    gamma_init: float = math.nan
    trials: int = 0
    g_dot_d: float = math.nan
    f_next: float = math.nan
    feasibility: float = math.nan
    vnorm: float = math.nan
    alarm_norm: float = math.nan
    center_changed: bool = False
    restart: bool = False
    elapsed: float = 0.0


TRACE_FIELDS = [f.name for f in fields(IterationRow)]
_INT_FIELDS = {"n", "l", "trials"}
_BOOL_FIELDS = {"center_changed", "restart"}


@dataclass
class RunRecord:
    rows: list[IterationRow] = field(default_factory=list)
    nfe: int = 0
    time: float = 0.0

    @property
    def itr(self) -> int:
        return self.rows[-1].n if self.rows else 0

    @property
    def change(self) -> int:
        return self.rows[-1].l if self.rows else 0

    @property
    def fval(self) -> float:
        return self.rows[-1].f

    @property
    def feasi(self) -> float:
        return self.rows[-1].feasibility

    @property
    def nrmg(self) -> float:
        return self.rows[-1].grad_norm

    def summary(self) -> dict:
        return {
            "fval": self.fval,
            "feasi": self.feasi,
            "nrmg": self.nrmg,
            "itr": self.itr,
            "time": self.time,
            "nfe": self.nfe,
            "change": self.change,
        }


@dataclass
class RunResult:
    point: StiefelPoint
    param: SkewParam | None
    center: CenterPoint | None
    reason: Termination
    record: RunRecord


class Stopwatch:
    """Monotonic clock that can be paused around diagnostics."""

    def __init__(self):
        self._total = 0.0
        self._since: float | None = None

    def start(self):
        self._since = time.perf_counter()

    def stop(self):
        if self._since is not None:
            self._total += time.perf_counter() - self._since
            self._since = None

    @property
    def elapsed(self) -> float:
        if self._since is None:
            return self._total
        return self._total + time.perf_counter() - self._since


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, int):
        return str(value)
    return "%.17g" % value


def write_trace(record: RunRecord, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(TRACE_FIELDS)
    for row in record.rows:
        w.writerow([_fmt(getattr(row, name)) for name in TRACE_FIELDS])


def trace_to_string(record: RunRecord) -> str:
    buf = io.StringIO()
    write_trace(record, buf)
    return buf.getvalue()


def read_trace(fh) -> list[IterationRow]:
    rows = []
    for raw in csv.DictReader(fh):
        kw = {}
        for name in TRACE_FIELDS:
            s = raw[name]
            if name in _INT_FIELDS:
                kw[name] = int(s)
            elif name in _BOOL_FIELDS:
                kw[name] = s == "1"
            else:
                kw[name] = float(s)
        rows.append(IterationRow(**kw))
    return rows


def armijo_violations(rows, c: float = 2.0**-13) -> list[int]:
    """Iteration indices whose recorded step fails the Armijo inequality.

    Evaluates ``f_next <= f + c * stepsize * g_dot_d`` in the same order as
    the line search, so a faithful trace yields an empty list.
    """
    bad = []
    for row in rows:
        if math.isnan(row.stepsize):
            continue
        if not (row.g_dot_d < 0.0 and row.f_next <= row.f + c * row.stepsize * row.g_dot_d):
            bad.append(row.n)
    return bad


def descent_violations(rows) -> list[int]:
    """Indices ``n`` with ``f_{n+1} > f_n``."""
    return [b.n for a, b in zip(rows, rows[1:]) if b.f > a.f]
