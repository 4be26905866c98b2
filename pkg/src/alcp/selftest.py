"""Invariant suite behind ``alcp selftest``.

Each check returns ``(passed, detail)``; :func:`run_selftest` prints one line
per check.
"""

from __future__ import annotations

import time

import numpy as np

from .cayley import forward, inverse, mobility, parametrize
from .center import choose_center, verify_center
from .driver import AlcpConfig, run
from .manifold import (
    CenterPoint,
    SkewParam,
    block_norms,
    feasibility,
    frobenius_inner,
    frobenius_norm,
    random_stiefel,
)
from .problems import Objective, generate
from .records import armijo_violations, descent_violations
from .retraction import qr_retraction, riemannian_grad

FD_STEP = 1e-6


def _random_center(rng, N, p) -> CenterPoint:
    q, _ = np.linalg.qr(rng.standard_normal((p, p)))
    return CenterPoint(q, N)


def _random_param(rng, N, p, scale=1.0) -> SkewParam:
    return SkewParam(scale * rng.standard_normal((p, p)), scale * rng.standard_normal((N - p, p)))


def _perturbed(obj: Objective) -> Objective:
    return Objective(obj.value, lambda u: (1.0 + 1e-3) * obj.gradient(u), obj.name + "+perturbed")


def check_round_trip(rng, N, p, samples):
    worst = 0.0
    for _ in range(samples):
        s = _random_center(rng, N, p)
        v = _random_param(rng, N, p)
        err = frobenius_norm(forward(s, inverse(s, v)) - v) / (1.0 + frobenius_norm(v))
        worst = max(worst, err)
    return worst <= 1e-9, f"max rel err {worst:.2e}"


def check_inverse_feasibility(rng, N, p, samples):
    worst = max(feasibility(inverse(_random_center(rng, N, p), _random_param(rng, N, p)).data) for _ in range(samples))
    return worst <= 1e-9, f"max ||I-U^TU||_F {worst:.2e}"


def check_gradient(rng, N, p, samples, perturb=False):
    worst = 0.0
    for kind in ("toy", "eig", "proc"):
        obj = generate(kind, N, p, rng).objective()
        if perturb:
            obj = _perturbed(obj)
        s = _random_center(rng, N, p)
        v = _random_param(rng, N, p, 0.5)
        J = parametrize(s, obj)
        g = J.gradient(v)
        gn = frobenius_norm(g)
        for _ in range(max(1, samples // 5)):
            e = _random_param(rng, N, p)
            e = e * (1.0 / frobenius_norm(e))
            fd = (obj.value(inverse(s, v + FD_STEP * e).data) - obj.value(inverse(s, v - FD_STEP * e).data)) / (2 * FD_STEP)
            worst = max(worst, abs(fd - frobenius_inner(g, e)) / gn)
    return worst < 1e-6, f"max rel err {worst:.2e}"


def check_center(rng, N, p, samples):
    bad = 0
    for _ in range(samples):
        u = random_stiefel(N, p, rng)
        d = verify_center(choose_center(u), u)
        if not (d.det_lower_ok and d.a_block_norm <= 1e-9 and d.b_block_norm <= 1 + 1e-9):
            bad += 1
    return bad == 0, f"{bad}/{samples} violations"


def check_mobility(rng, N, p, samples):
    if p == N:
        return True, "skipped (p = N)"
    ok = mobility(SkewParam.zeros(N, p)) == 2.0
    bad = 0
    tau = 1e-4
    for _ in range(samples):
        s = _random_center(rng, N, p)
        v = _random_param(rng, N, p)
        r = mobility(v)
        _, nb = block_norms(v)
        if r < 2.0 / np.sqrt(1.0 + nb**2) * (1 - 1e-12):
            bad += 1
        e = _random_param(rng, N, p)
        e = e * (1.0 / frobenius_norm(e))
        moved = np.linalg.norm(inverse(s, v + tau * e).data - inverse(s, v).data)
        if moved > 1.01 * tau * r:
            bad += 1
    return ok and bad == 0, f"r(0)==2: {ok}, {bad} bound violations"


def check_runs(rng, N, p, samples, perturb=False):
    """Short ALCP runs: descent, Armijo replay and the max{1, T} bound."""
    problems = []
    for kind in ("eig", "proc"):
        obj = generate(kind, N, p, rng).objective()
        problems.append(_perturbed(obj) if perturb else obj)
    issues = []
    for obj in problems:
        for engine in ("gd", "cg-hs+"):
            res = run(obj, random_stiefel(N, p, rng), AlcpConfig(engine=engine, max_iter=200))
            rows = res.record.rows
            if descent_violations(rows):
                issues.append(f"{obj.name}/{engine}: ascent")
            if armijo_violations(rows):
                issues.append(f"{obj.name}/{engine}: Armijo")
            if max(r.vnorm for r in rows) > 1.5 + 1e-9:
                issues.append(f"{obj.name}/{engine}: ||V|| bound")
    return not issues, "; ".join(issues) or "descent, Armijo and ||V||_2 <= 1.5 hold"


def check_retraction(rng, N, p, samples):
    worst_t = worst_f = 0.0
    for _ in range(samples):
        u = random_stiefel(N, p, rng).data
        g = riemannian_grad(u, rng.standard_normal((N, p)))
        worst_t = max(worst_t, g.residual(u))
        worst_f = max(worst_f, feasibility(qr_retraction(u, 0.1 * g.data).data))
    return worst_t <= 1e-9 and worst_f <= 1e-9, f"tangency {worst_t:.2e}, feasibility {worst_f:.2e}"


CHECKS = [
    ("round-trip forward(inverse(V)) = V", check_round_trip),
    ("inverse output is feasible", check_inverse_feasibility),
    ("pullback gradient vs finite differences", check_gradient),
    ("center choice guarantees", check_center),
    ("mobility constants and bounds", check_mobility),
    ("runs: descent, Armijo, boundedness", check_runs),
    ("riemannian gradient and QR retraction", check_retraction),
]


def run_selftest(N: int = 60, p: int = 5, samples: int = 100, seed: int = 0, perturb: bool = False) -> bool:
    rng = np.random.default_rng(seed)
    all_ok = True
    t0 = time.perf_counter()
    for name, fn in CHECKS:
        kwargs = {"perturb": perturb} if fn in (check_gradient, check_runs) else {}
        ok, detail = fn(rng, N, p, samples, **kwargs)
        all_ok &= ok
        print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    print(f"{'all checks passed' if all_ok else 'FAILURES'} in {time.perf_counter() - t0:.1f}s")
    return all_ok
