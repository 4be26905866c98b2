"""Benchmark harness: multi-trial runs, summary tables and convergence histories.

Every flag can also be set through an environment variable named ``ALCP_``
plus the flag name in upper case with dashes turned into underscores, e.g.
``ALCP_MAX_ITER=500`` or ``ALCP_N=300``. Command-line flags win.

Exit codes: 0 success, 1 configuration error, 2 self-test failure.
"""

from __future__ import annotations

import argparse
import csv
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .driver import AlarmMode, AlcpConfig, run
from .manifold import CenterPoint, random_stiefel
from .optimizers import Kind
from .problems import generate
from .records import trace_to_string
from .retraction import run_rgd

ENV_PREFIX = "ALCP_"
SUMMARY_FIELDS = ["algo", "strategy", "N", "p", "fval", "feasi", "nrmg", "itr", "time", "nfe", "change"]
TRIAL_FIELDS = ["trial", "algo", "strategy", "N", "p", "reason", "fval", "feasi", "nrmg", "itr", "time", "nfe", "change"]
METRICS = ["fval", "feasi", "nrmg", "itr", "time", "nfe", "change"]


class ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


@dataclass(frozen=True)
class TrialSpec:
    problem: str
    N: int
    p: int
    engine: str
    strategy: str
    threshold: float
    tol: float
    max_iter: int
    center: str
    entropy: int
    index: int
    history: bool = False


def run_trial(spec: TrialSpec) -> dict:
    """Run one trial and return its metrics (plus the trace if requested).

    Trial ``i`` draws from ``SeedSequence(seed).spawn(trials)[i]``, split into
    an instance stream and a starting-point stream. Instance generation, the
    reference optimum and trace formatting happen outside the timed region.
    """
    seq = np.random.SeedSequence(spec.entropy, spawn_key=(spec.index,))
    inst_seed, start_seed = seq.spawn(2)
    inst = generate(spec.problem, spec.N, spec.p, inst_seed)
    objective = inst.objective()
    u0 = random_stiefel(spec.N, spec.p, start_seed)
    fstar = inst.optimal_value

    cfg = AlcpConfig(
        alarm_threshold=spec.threshold,
        rel_grad_tol=spec.tol,
        max_iter=spec.max_iter,
        engine=Kind(spec.engine),
        alarm_mode=AlarmMode.NEVER if spec.strategy == "cp" else AlarmMode.STANDARD,
    )
    if spec.strategy == "qr":
        result = run_rgd(objective, u0, cfg)
    else:
        center = CenterPoint.identity(spec.N, spec.p) if spec.center == "identity" else None
        result = run(objective, u0, cfg, center=center)
    rec = result.record
    out = {"trial": spec.index, "reason": result.reason.value, **rec.summary()}
    out["fval"] = rec.fval - fstar
    if spec.history:
        out["history"] = trace_to_string(rec)
    return out


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    return "%.17g" % x


def summarize(results: list[dict], omit_time: bool = False) -> dict:
    row = {k: float(np.mean([r[k] for r in results])) for k in METRICS}
    if omit_time:
        row["time"] = math.nan
    else:
        row["time"] = round(row["time"], 6)
    return row


def write_summary(path, head: dict, summary: dict) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SUMMARY_FIELDS)
        w.writerow([_fmt({**head, **summary}[k]) for k in SUMMARY_FIELDS])


def write_trials(path, head: dict, results: list[dict], omit_time: bool = False) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRIAL_FIELDS)
        for r in results:
            r = dict(r, time=math.nan if omit_time else round(r["time"], 6))
            w.writerow([_fmt({**head, **r}[k]) for k in TRIAL_FIELDS])


def _env_default(name: str, default, cast=str):
    raw = os.environ.get(ENV_PREFIX + name.upper().replace("-", "_"))
    if raw is None:
        return default
    try:
        return cast(raw)
    except ValueError as exc:
        raise ConfigError(f"bad value for {ENV_PREFIX}{name.upper()}: {raw!r}") from exc


def _flag(raw: str) -> bool:
    if raw.lower() in ("1", "true", "yes", "on"):
        return True
    if raw.lower() in ("0", "false", "no", "off", ""):
        return False
    raise ValueError(raw)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="alcp", description="Stiefel-manifold optimization benchmarks")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("run", help="multi-trial benchmark")
    r.add_argument("--problem", choices=["toy", "eig", "proc"], default=_env_default("problem", "toy"))
    r.add_argument("--N", type=int, default=_env_default("N", 1000, int))
    r.add_argument("--p", type=int, default=_env_default("p", 10, int))
    r.add_argument("--engine", choices=[k.value for k in Kind], default=_env_default("engine", "gd"))
    r.add_argument("--strategy", choices=["alcp", "cp", "qr"], default=_env_default("strategy", "alcp"))
    r.add_argument("--T", type=float, default=_env_default("T", 1.5, float), help="alarm threshold")
    r.add_argument("--tol", type=float, default=_env_default("tol", 1e-5, float))
    r.add_argument("--max-iter", type=int, default=_env_default("max-iter", 2000, int))
    r.add_argument("--trials", type=int, default=_env_default("trials", 1, int))
    r.add_argument("--seed", type=int, default=_env_default("seed", 0, int))
    r.add_argument("--center", choices=["auto", "identity"], default=_env_default("center", "auto"))
    r.add_argument("--jobs", type=int, default=_env_default("jobs", 1, int))
    r.add_argument("--out", default=_env_default("out", "summary.csv"), help="summary CSV path")
    r.add_argument("--trials-out", default=_env_default("trials-out", None), help="per-trial CSV path")
    r.add_argument("--history-out", default=_env_default("history-out", None), help="directory for per-iteration CSVs")
    r.add_argument(
        "--omit-time",
        action="store_true",
        default=_env_default("omit-time", False, _flag),
        help="write time as nan so repeated runs give byte-identical files",
    )

    s = sub.add_parser("selftest", help="run the invariant suite")
    s.add_argument("--N", type=int, default=_env_default("N", 60, int))
    s.add_argument("--p", type=int, default=_env_default("p", 5, int))
    s.add_argument("--samples", type=int, default=_env_default("samples", 100, int))
    s.add_argument("--seed", type=int, default=_env_default("seed", 0, int))
    s.add_argument(
        "--perturb-gradient",
        action="store_true",
        default=_env_default("perturb-gradient", False, _flag),
        help="scale the Euclidean gradient by 1 + 1e-3 (negative control)",
    )
    return parser


def _validate(args) -> None:
    if not args.N >= args.p >= 1:
        raise ConfigError(f"need N >= p >= 1, got N={args.N}, p={args.p}")
    if args.trials < 1 or args.jobs < 1 or args.max_iter < 0:
        raise ConfigError("trials and jobs must be positive, max-iter nonnegative")
    if args.strategy == "qr" and args.engine != "gd":
        raise ConfigError("the QR baseline only supports --engine gd")
    if args.problem == "toy" and args.N < 2:
        raise ConfigError("toy problem needs N >= 2")
    if not args.T > 0 or not args.tol > 0:
        raise ConfigError("T and tol must be positive")


def cmd_run(args) -> int:
    _validate(args)
    specs = [
        TrialSpec(
            args.problem, args.N, args.p, args.engine, args.strategy, args.T, args.tol,
            args.max_iter, args.center, args.seed, i, args.history_out is not None,
        )
        for i in range(args.trials)
    ]
    results: list[dict] = []
    failure = None
    try:
        if args.jobs > 1:
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                for r in pool.map(run_trial, specs):
                    results.append(r)
        else:
            for s in specs:
                results.append(run_trial(s))
    except Exception as exc:  # flush what finished, then report
        failure = exc

    head = {"algo": args.engine, "strategy": args.strategy, "N": args.N, "p": args.p}
    if results:
        write_summary(args.out, head, summarize(results, args.omit_time))
    if args.trials_out:
        write_trials(args.trials_out, head, results, args.omit_time)
    if args.history_out:
        d = Path(args.history_out)
        d.mkdir(parents=True, exist_ok=True)
        for r in results:
            name = f"{args.problem}_{args.strategy}_{args.engine}_trial{r['trial']:03d}.csv"
            (d / name).write_text(r["history"])
    for r in results:
        print(f"trial {r['trial']}: {r['reason']} itr={r['itr']} change={r['change']} fval={r['fval']:.3e}")
    if failure is not None:
        print(f"alcp: error: trial {len(results)} failed: {failure!r}", file=sys.stderr)
        return 1
    return 0


def cmd_selftest(args) -> int:
    from .selftest import run_selftest

    ok = run_selftest(N=args.N, p=args.p, samples=args.samples, seed=args.seed, perturb=args.perturb_gradient)
    return 0 if ok else 2


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.command == "run":
            return cmd_run(args)
        if not args.N >= args.p >= 1:
            raise ConfigError(f"need N >= p >= 1, got N={args.N}, p={args.p}")
        return cmd_selftest(args)
    except ConfigError as exc:
        print(f"alcp: error: {exc}", file=sys.stderr)
        return 1
