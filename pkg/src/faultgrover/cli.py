"""Command line interface: curves, schedule, simulate, verify.

Exit codes: 0 success, 1 usage error, 2 bound violation, 3 Monte Carlo
regression (empirical failure inconsistent with the analytic value).

Tables are emitted as CSV (default) or JSON; reals are printed with 17
significant digits so every value round-trips exactly.  Output is
byte-identical across reruns with the same arguments and seed.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import analytics, harness
from .noise import NoiseModel
from .schedulers import (
    DP_DIM_CAP,
    Schedule,
    schedule_alg1,
    schedule_alg2,
    schedule_classical,
    schedule_dp,
    schedule_known_p,
)
from .simulator import grover_round_fastpath_dephasing

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_BOUND_VIOLATION = 2
EXIT_MC_REGRESSION = 3


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; the CLI contract wants 1
    def error(self, message):
        raise UsageError(message)


def fmt_value(v) -> str:
    if v is None:
        return "na"
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def emit_table(rows: list[dict], columns: list[str], fmt: str, output: str) -> None:
    if fmt == "json":
        text = json.dumps([{c: r.get(c) for c in columns} for r in rows], indent=1)
        text += "\n"
    else:
        numbered = " ".join(f"{i + 1}={c}" for i, c in enumerate(columns))
        lines = [f"# columns: {numbered}", ",".join(columns)]
        for r in rows:
            lines.append(",".join(fmt_value(r.get(c)) for c in columns))
        text = "\n".join(lines) + "\n"
    if output == "-":
        sys.stdout.write(text)
    else:
        with open(output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def parse_int_list(text: str) -> list[int]:
    return [int(part) for part in text.split(",") if part]


def parse_float_list(text: str) -> list[float]:
    return [float(part) for part in text.split(",") if part]


def parse_k_range(text: str) -> list[int]:
    if ".." in text:
        lo, hi = text.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return parse_int_list(text)


def build_noise(kind: str, p: float, N: int) -> NoiseModel:
    """Noise flag grammar: depolarizing | dephasing | reset[:target-index] | none."""
    if kind == "none":
        return NoiseModel.none()
    if kind == "depolarizing":
        return NoiseModel.depolarizing(p)
    if kind == "dephasing":
        return NoiseModel.dephasing(p)
    if kind == "reset":
        return NoiseModel.reset(p)
    if kind.startswith("reset:"):
        idx = int(kind.split(":", 1)[1])
        if not 0 <= idx < N:
            raise UsageError(f"reset target index {idx} outside 0..{N - 1}")
        target = [0.0] * N
        target[idx] = 1.0
        return NoiseModel.reset(p, target)
    raise UsageError(f"unknown noise kind {kind!r}")


def build_schedule(scheduler: str, N: int, eps: float, p: float | None,
                   c: float, p_star: float, variant: str) -> Schedule:
    if scheduler == "alg1":
        return schedule_alg1(N, eps, c)
    if scheduler == "alg2":
        return schedule_alg2(N, eps, c)
    if scheduler == "classical":
        return schedule_classical(N, eps)
    if scheduler == "knownp":
        if p is None:
            raise UsageError("--scheduler knownp requires --p")
        return schedule_known_p(N, p, eps, c=5.0 if c == 10.0 else c, p_star=p_star)
    if scheduler == "dp":
        if p is None:
            raise UsageError("--scheduler dp requires --p")
        if N > DP_DIM_CAP:
            raise UsageError(f"dp schedules are capped at N = {DP_DIM_CAP}")
        return schedule_dp(N, p, eps, variant)
    raise UsageError(f"unknown scheduler {scheduler!r}")


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("FAULTGROVER_THREADS", "1")))
    except ValueError:
        return 1


def _map(fn, items):
    workers = _workers()
    if workers == 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# subcommands


CURVE_COLUMNS = ["N", "k", "p", "p_noiseless", "p_lower", "p_depol_exact",
                 "p_dephase", "rate_exact", "rate_lower"]
ASYMPTOTIC_COLUMNS = ["k", "p", "rate_asymptotic", "is_kopt"]


def cmd_curves(args) -> int:
    ps = parse_float_list(args.p)
    if args.asymptotic:
        rows = []
        for p in ps:
            if p <= 0.0:
                raise UsageError("asymptotic curves need p > 0 (k_opt is unbounded at 0)")
            kopt = analytics.k_opt(None, p)
            ks = parse_k_range(args.k) if args.k else list(range(0, max(10, 2 * kopt + 2)))
            for k in ks:
                rows.append({
                    "k": k, "p": p,
                    "rate_asymptotic": analytics.rate(None, k, p).R,
                    "is_kopt": k == kopt,
                })
        emit_table(rows, ASYMPTOTIC_COLUMNS, args.format, args.output)
        return EXIT_OK
    if args.N is None:
        raise UsageError("curves needs --N or --asymptotic")
    ks = parse_k_range(args.k) if args.k else list(range(0, 21))
    rows = []
    for N in parse_int_list(args.N):
        for p in ps:
            for k in ks:
                rows.append({
                    "N": N, "k": k, "p": p,
                    "p_noiseless": analytics.p_success_noiseless(N, k),
                    "p_lower": analytics.p_success_lower(N, k, p),
                    "p_depol_exact": analytics.p_success_depol_exact(N, k, p),
                    "p_dephase": grover_round_fastpath_dephasing(N, k, p),
                    "rate_exact": analytics.rate(N, k, p, analytics.VARIANT_EXACT).R,
                    "rate_lower": analytics.rate(N, k, p, analytics.VARIANT_LOWER).R,
                })
    emit_table(rows, CURVE_COLUMNS, args.format, args.output)
    return EXIT_OK


def cmd_schedule(args) -> int:
    sched = build_schedule(args.scheduler, args.N, args.eps, args.p,
                           args.c, args.pstar, args.variant)
    summary_bits = []
    if args.p is not None:
        model = build_noise(args.noise, args.p, args.N)
        prefix, run = harness.truncate_at_eps(
            args.N, model, args.eps, sched, harness.SUCCESS_LOWER)
        summary_bits.append(
            f"queries_to_eps={fmt_value(run.queries_to_eps)} "
            f"model=lower-bound noise={model.describe()}")
    # bounded schedules are written in full; unbounded ones need a cut:
    # --max-rounds, else the eps-budget prefix under --p, else through the
    # first zero-length round
    if args.max_rounds is not None:
        max_rounds = args.max_rounds
        if not sched.unbounded:
            max_rounds = min(max_rounds, sched.max_rounds)
    elif not sched.unbounded:
        max_rounds = sched.max_rounds
    elif args.p is not None:
        max_rounds = prefix.max_rounds if not prefix.unbounded else None
        if max_rounds is None:
            raise UsageError("schedule never reaches eps; pass --max-rounds")
    else:
        g = 0
        while sched.round_length(g) > 0:
            g += 1
        max_rounds = g + 1
    total = sum(k + 1 for k in sched.iter_rounds(max_rounds))
    summary_bits.insert(0, f"rounds={max_rounds} total_queries={total}")
    text = sched.to_text(max_rounds=max_rounds, summary=" ".join(summary_bits))
    if args.output == "-":
        sys.stdout.write(text)
    else:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    return EXIT_OK


SWEEP_COLUMNS = ["N", "p", "eps", "scheduler", "noise", "trials", "seed",
                 "analytic_queries", "analytic_failure", "mc_failure",
                 "mc_mean_queries", "wilson95_lo", "wilson95_hi",
                 "wilson99_lo", "wilson99_hi", "truncated"]


def cmd_simulate(args) -> int:
    if args.p is None:
        raise UsageError("simulate requires --p")
    if args.trials < 1000:
        raise UsageError("simulate needs at least 1000 trials for interval estimates")
    if args.schedule_file is not None:
        with open(args.schedule_file, encoding="utf-8") as fh:
            sched = Schedule.from_text(fh.read())
        if args.N is not None and args.N != sched.N:
            raise UsageError(
                f"--N {args.N} disagrees with the schedule file (N={sched.N})")
        N, tag = sched.N, f"file:{sched.provenance.value}"
    elif args.scheduler is None or args.N is None:
        raise UsageError("simulate needs --scheduler and --N, or --schedule-file")
    else:
        N, tag = args.N, args.scheduler
        sched = build_schedule(args.scheduler, N, args.eps, args.p,
                               args.c, args.pstar, args.variant)
    model = build_noise(args.noise, args.p, N)
    truncated, run = harness.truncate_at_eps(N, model, args.eps, sched,
                                             harness.SUCCESS_SIM)
    est = harness.mc_estimate(N, model, truncated, args.trials, args.seed)
    row = harness.SweepRow(
        N=N, p=args.p, eps=args.eps, scheduler=tag,
        noise=model.describe(), trials=args.trials, seed=args.seed,
        analytic_queries=run.queries_to_eps, analytic_failure=run.final_failure,
        mc_failure=est.failure_rate, mc_mean_queries=est.mean_queries_success,
        wilson95_lo=est.wilson95[0], wilson95_hi=est.wilson95[1],
        wilson99_lo=est.wilson99[0], wilson99_hi=est.wilson99[1],
        truncated=run.truncated,
    )
    emit_table([row.__dict__], SWEEP_COLUMNS, args.format, args.output)
    if not est.wilson99[0] <= run.final_failure <= est.wilson99[1]:
        print("MC regression: analytic failure outside the 99% Wilson interval",
              file=sys.stderr)
        return EXIT_MC_REGRESSION
    return EXIT_OK


VERIFY_COLUMNS = ["check", "N", "p", "eps", "measured", "bound", "direction",
                  "verdict", "advisory", "detail"]


def _report_row(rep: harness.BoundReport) -> dict:
    params = dict(rep.params)

    def clean(x):
        return None if isinstance(x, float) and math.isnan(x) else x

    row = {
        "check": rep.check,
        "N": params.pop("N", None),
        "p": params.pop("p", None),
        "eps": params.pop("eps", None),
        "measured": clean(rep.measured),
        "bound": clean(rep.bound),
        "direction": rep.direction,
        "verdict": rep.verdict,
        "advisory": rep.advisory,
        "detail": ";".join(f"{k}={fmt_value(v)}" for k, v in sorted(params.items()))
                  + (f";{rep.note}" if rep.note else ""),
    }
    return row


def _lemma1_report(samples: int) -> harness.BoundReport:
    n_alpha = 20
    n_xy = max(10, round(math.sqrt(samples / n_alpha)))
    xs = np.linspace(0.0, 1.0, n_xy)
    alphas = np.geomspace(0.01, 100.0, n_alpha)
    x = xs[:, None, None]
    y = xs[None, :, None]
    a = alphas[None, None, :]
    gap = (1.0 + 0.5 * (a - 1.0) * x + 0.5 * (1.0 / a - 1.0) * y
           - np.sqrt(x * y) - np.sqrt((1.0 - x) * (1.0 - y)))
    return harness.BoundReport(
        check="lemma1", params={"grid": f"{n_xy}x{n_xy}x{n_alpha}"},
        measured=float(gap.min()), bound=0.0, direction=">=",
        verdict="pass" if gap.min() >= -1e-12 else "fail",
        note="minimum tangent-plane gap over the grid")


def _lemma2_report(samples: int, seed: int) -> harness.BoundReport:
    rng = np.random.default_rng(seed)
    worst = math.inf
    for _ in range(samples):
        p = rng.uniform(1e-6, 1.0)
        eps = rng.uniform(1e-6, 1.0 - 1e-6)
        lo, mid, hi = analytics.lemma2_sandwich(p, eps)
        worst = min(worst, mid - lo, hi - mid)
    return harness.BoundReport(
        check="lemma2", params={"samples": samples},
        measured=worst, bound=0.0, direction=">=",
        verdict="pass" if worst >= -1e-12 else "fail",
        note="minimum sandwich slack over random samples")


def _zalka_closure_report() -> harness.BoundReport:
    worst = 0.0
    for N in (4, 100, 4096):
        for k in range(1, 51):
            diff = abs(analytics.zalka_bound_from_lemma1(N, k)
                       - analytics.zalka_explicit_bound(N, k))
            worst = max(worst, diff)
    return harness.BoundReport(
        check="zalka-closure", params={"k": "1..50"},
        measured=worst, bound=1e-12, direction="<=",
        verdict="pass" if worst <= 1e-12 else "fail",
        note="lemma-derived bound against the closed form")


def cmd_verify(args) -> int:
    Ns = parse_int_list(args.N) if args.N else list(harness.GRID_N)
    ps = parse_float_list(args.p) if args.p else list(harness.GRID_P)
    epss = parse_float_list(args.eps) if args.eps else list(harness.GRID_EPS)
    thms = set(args.thm) if args.thm else None
    lemmas = set(args.lemma) if args.lemma else None
    everything = thms is None and lemmas is None and not args.appendix_c

    reports: list[harness.BoundReport] = []
    if thms is not None or everything:
        wanted = thms or {1, 2, 3, 4, 5}
        if 1 in wanted:
            for N in Ns:
                reports.extend(r for p in ps for r in harness.verify_thm1(N, p))
        if wanted & {2, 3, 4, 5}:
            points = [(N, p, eps) for N in Ns for p in ps for eps in epss]
            for point_reports in _map(lambda t: harness.verify_point(*t), points):
                reports.extend(point_reports)
            if thms is not None:
                keep = {2: ("thm2-alg1", "thm2-knownp", "thm2"),
                        3: ("thm3",), 4: ("thm4",),
                        5: ("thm5-alg2", "thm5-dp", "thm5", "thm5-ratio",
                            "dp-dominance")}
                allowed = {c for t in wanted if t in keep for c in keep[t]}
                allowed |= {"thm1"}
                reports = [r for r in reports if r.check in allowed]
    if everything:
        reports.extend(harness.verify_scaling())
        reports.append(harness.verify_quantum_advantage())
    if args.appendix_c or everything:
        appc_ps = ps if args.p else list(harness.APPENDIX_C_P)
        reports.extend(harness.verify_appendix_c(N, p, eps)
                       for N in Ns if N >= 100
                       for p in appc_ps for eps in epss if eps <= 0.5)
        if args.advisory or everything:
            reports.extend(harness.verify_alg1_c20_advisory())
    if lemmas is not None or everything:
        wanted = lemmas or {1, 2}
        if 1 in wanted:
            reports.append(_lemma1_report(args.samples))
            reports.append(_zalka_closure_report())
        if 2 in wanted:
            reports.append(_lemma2_report(min(args.samples, 100000), args.seed))

    rows = [_report_row(r) for r in reports]
    # canonical emission order: (N, p, eps, tag), parameter-free rows first
    rows.sort(key=lambda r: (r["N"] if r["N"] is not None else -1,
                             r["p"] if r["p"] is not None else -1.0,
                             r["eps"] if r["eps"] is not None else -1.0,
                             r["check"], r["detail"]))
    emit_table(rows, VERIFY_COLUMNS, args.format, args.output)
    failed = [r for r in reports if r.verdict == "fail" and not r.advisory]
    if failed:
        print(f"{len(failed)} bound check(s) failed", file=sys.stderr)
        return EXIT_BOUND_VIOLATION
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> Parser:
    parser = Parser(prog="faultgrover",
                    description="Noisy Grover search: curves, schedules, "
                                "simulation, and bound verification")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--output", default="-", help="file path or - for stdout")
        p.add_argument("--seed", type=int, default=42)

    c = sub.add_parser("curves", help="success probabilities and rates")
    common(c)
    c.add_argument("--N", help="dimension(s), comma separated")
    c.add_argument("--asymptotic", action="store_true")
    c.add_argument("--p", required=True, help="noise strength(s), comma separated")
    c.add_argument("--k", help="iteration count: n, list, or lo..hi")
    c.set_defaults(func=cmd_curves)

    s = sub.add_parser("schedule", help="construct and serialize a schedule")
    common(s)
    s.add_argument("--scheduler", required=True,
                   choices=("knownp", "alg1", "alg2", "classical", "dp"))
    s.add_argument("--N", type=int, required=True)
    s.add_argument("--eps", type=float, required=True)
    s.add_argument("--p", type=float)
    s.add_argument("--c", type=float, default=10.0)
    s.add_argument("--pstar", type=float, default=0.5)
    s.add_argument("--noise", default="depolarizing")
    s.add_argument("--variant", default=analytics.VARIANT_LOWER,
                   choices=(analytics.VARIANT_LOWER, analytics.VARIANT_EXACT))
    s.add_argument("--max-rounds", type=int)
    s.set_defaults(func=cmd_schedule)

    m = sub.add_parser("simulate", help="Monte Carlo against the analytic run")
    common(m)
    m.add_argument("--scheduler",
                   choices=("knownp", "alg1", "alg2", "classical", "dp"))
    m.add_argument("--schedule-file", help="replay a serialized schedule")
    m.add_argument("--N", type=int)
    m.add_argument("--eps", type=float, required=True)
    m.add_argument("--p", type=float, required=True)
    m.add_argument("--noise", default="depolarizing",
                   help="depolarizing|dephasing|reset[:index]|none")
    m.add_argument("--trials", type=int, default=100000)
    m.add_argument("--c", type=float, default=10.0)
    m.add_argument("--pstar", type=float, default=0.5)
    m.add_argument("--variant", default=analytics.VARIANT_LOWER,
                   choices=(analytics.VARIANT_LOWER, analytics.VARIANT_EXACT))
    m.set_defaults(func=cmd_simulate)

    v = sub.add_parser("verify", help="check every stated bound on a grid")
    common(v)
    v.add_argument("--thm", type=int, action="append", choices=(1, 2, 3, 4, 5))
    v.add_argument("--lemma", type=int, action="append", choices=(1, 2))
    v.add_argument("--appendix-c", action="store_true")
    v.add_argument("--advisory", action="store_true",
                   help="include the sharpened-constants advisory checks")
    v.add_argument("--N", help="grid override, comma separated")
    v.add_argument("--p", help="grid override, comma separated")
    v.add_argument("--eps", help="grid override, comma separated")
    v.add_argument("--samples", type=int, default=200000)
    v.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OSError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
