"""Command-line interface.

Subcommands: validate, metrics, simulate, compare, enumerate, plan,
export-dot, serve. Exit codes: 0 success, 1 domain findings (validation
errors, infeasible plans), 2 usage or I/O failure. Human tables round to two
decimals (grad-rate rows to three); `--format machine` emits full-precision
JSON with a stable schema.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

from . import experiments, io_formats, planner
from .metrics import curriculum_metrics
from .model import Curriculum, ValidationReport
from .simulation import (ANALYTIC, EXACT, MONTE_CARLO, PassRateTable,
                         SimulationConfig, simulate)

_MODE_ALIASES = {"analytic": ANALYTIC, "mc": MONTE_CARLO, "exact": EXACT}


def _default_threads() -> int:
    try:
        return max(1, int(os.environ.get("CA_THREADS", "1")))
    except ValueError:
        return 1


def _read_file(path: str) -> str:
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _load_curriculum(path: str, lenient: bool = False):
    """Returns (curriculum, exit_code); prints findings on failure."""
    try:
        text = _read_file(path)
    except OSError as e:
        print(f"error: cannot read {path}: {e.strerror}", file=sys.stderr)
        return None, 2
    parsed = io_formats.parse_curriculum(text, lenient=lenient)
    if isinstance(parsed, ValidationReport):
        for err in parsed.errors:
            print(f"error: {err}")
        for warn in parsed.warnings:
            print(f"warning: {warn}")
        return None, 1
    return parsed, 0


def _parse_rates(spec: str):
    if spec.startswith("uniform:"):
        try:
            return PassRateTable.uniform(float(spec.split(":", 1)[1]))
        except ValueError as e:
            print(f"error: --pass-rates {spec!r}: {e}", file=sys.stderr)
            return None
    try:
        text = _read_file(spec)
    except OSError as e:
        print(f"error: cannot read pass-rate file {spec}: {e.strerror}", file=sys.stderr)
        return None
    rates = io_formats.parse_pass_rates(text)
    if isinstance(rates, ValidationReport):
        for err in rates.errors:
            print(f"error: pass-rate file {spec}: {err}", file=sys.stderr)
        return None
    return rates


# -- subcommands ---------------------------------------------------------------


def cmd_validate(args) -> int:
    try:
        text = _read_file(args.file)
    except OSError as e:
        print(f"error: cannot read {args.file}: {e.strerror}", file=sys.stderr)
        return 2
    parsed = io_formats.parse_curriculum(text, lenient=args.lenient)
    if isinstance(parsed, ValidationReport):
        for err in parsed.errors:
            print(f"error: {err}")
        for warn in parsed.warnings:
            print(f"warning: {warn}")
        print(f"invalid: {len(parsed.errors)} error(s), {len(parsed.warnings)} warning(s)")
        return 1
    for warn in parsed.validation_warnings:
        print(f"warning: {warn}")
    print(f"valid: {parsed.name} ({len(parsed)} courses, {len(parsed.requisites)} requisites, "
          f"{len(parsed.plans)} plans, {len(parsed.validation_warnings)} warning(s))")
    return 0


def cmd_metrics(args) -> int:
    c, code = _load_curriculum(args.file)
    if c is None:
        return code
    report = curriculum_metrics(c)
    if args.format == "machine":
        print(json.dumps(io_formats.metrics_to_dict(report)))
        return 0
    print(f"curriculum: {c.name} ({len(c)} courses, {len(c.requisites)} requisites)")
    if args.per_course:
        header = f"{'course':<16}{'delay':>7}{'blocking':>10}{'reachability':>14}{'centrality':>12}{'complexity':>12}"
        print(header)
        for m in report.courses:
            print(f"{m.course_id:<16}{m.delay:>7}{m.blocking:>10}{m.reachability:>14}"
                  f"{m.centrality:>12}{m.complexity:>12}")
    print(f"totals: delay {report.delay}, blocking {report.blocking}, "
          f"reachability {report.reachability}")
    print(f"longest path length: {report.longest_path_length}")
    print(f"structural complexity: {report.complexity}")
    return 0


def cmd_simulate(args) -> int:
    c, code = _load_curriculum(args.file)
    if c is None:
        return code
    rates = _parse_rates(args.pass_rates)
    if rates is None:
        return 2
    try:
        plan = c.plan(args.plan)
    except KeyError as e:
        print(f"error: {e.args[0]}", file=sys.stderr)
        return 1
    horizon = math.ceil(args.horizon_multiplier * len(plan.terms))
    cfg = SimulationConfig(horizon_terms=horizon, mode=_MODE_ALIASES[args.mode],
                           plan=args.plan, rates=rates, students=args.students,
                           seed=args.seed, threads=args.threads)
    try:
        result = simulate(c, cfg)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    if args.format == "machine":
        print(json.dumps(result.to_dict()))
        return 0
    print(f"simulation: {c.name} plan={args.plan} mode={result.mode} "
          f"horizon={horizon} terms")
    terms = range(1, horizon + 1)
    print(f"{'course':<16}" + "".join(f"{f't{t}':>9}" for t in terms))
    for cid in result.course_ids:
        row = result.course_row(cid)
        print(f"{cid:<16}" + "".join(f"{100 * x:>9.2f}" for x in row))
    print(f"{'grad rate':<16}" + "".join(f"{g:>9.3f}" for g in result.grad_rate))
    return 0


def cmd_compare(args) -> int:
    a, code = _load_curriculum(args.file_a)
    if a is None:
        return code
    b, code = _load_curriculum(args.file_b)
    if b is None:
        return code
    ra, rb = curriculum_metrics(a), curriculum_metrics(b)
    if args.format == "machine":
        print(json.dumps({
            "a": {"name": a.name, **io_formats.metrics_to_dict(ra)},
            "b": {"name": b.name, **io_formats.metrics_to_dict(rb)},
        }))
        return 0
    print(f"comparison: {a.name} vs {b.name}")
    rows = [
        ("delay", ra.delay, rb.delay),
        ("blocking", ra.blocking, rb.blocking),
        ("reachability", ra.reachability, rb.reachability),
        ("structural complexity", ra.complexity, rb.complexity),
        ("longest path length", ra.longest_path_length, rb.longest_path_length),
    ]
    print(f"{'metric':<24}{'A':>8}{'B':>8}{'delta':>8}")
    for label, va, vb in rows:
        print(f"{label:<24}{va:>8}{vb:>8}{vb - va:>+8}")
    cxa = {m.course_id: m.complexity for m in ra.courses}
    cxb = {m.course_id: m.complexity for m in rb.courses}
    diffs = []
    for cid in sorted(set(cxa) | set(cxb)):
        delta = cxb.get(cid, 0) - cxa.get(cid, 0)
        if delta != 0:
            diffs.append((abs(delta), cid, cxa.get(cid), cxb.get(cid), delta))
    diffs.sort(key=lambda d: (-d[0], d[1]))
    if diffs:
        print("top per-course complexity changes:")
        for _, cid, va, vb, delta in diffs[:5]:
            left = "absent" if va is None else str(va)
            right = "absent" if vb is None else str(vb)
            print(f"  {cid:<16}{left:>8} -> {right:<8}{delta:>+5}")
    return 0


def cmd_enumerate(args) -> int:
    try:
        space = experiments.enumerate_balanced(args.courses, args.terms,
                                               include_coreqs=args.include_coreqs,
                                               dedupe=not args.no_dedupe)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    complexities = sorted(curriculum_metrics(m).complexity for m in space.members)
    print(f"{len(space)} curricula ({args.courses} courses over {args.terms} terms)")
    print("complexities: " + ", ".join(str(h) for h in complexities))
    if not args.simulate:
        return 0
    horizon = args.horizon or 2 * args.terms
    points = experiments.complexity_completion_study(
        space, args.pass_rate, horizon, mode=_MODE_ALIASES[args.mode],
        students=args.students, seed=args.seed)
    if args.csv:
        try:
            with open(args.csv, "w", encoding="utf-8") as fh:
                experiments.study_to_csv(points, fh)
        except OSError as e:
            print(f"error: cannot write {args.csv}: {e.strerror}", file=sys.stderr)
            return 2
        print(f"wrote {len(points)} study rows to {args.csv}")
    else:
        for p in points:
            print(f"  {p.member}  h={p.complexity:<4} completion={p.completion:.4f}")
    if args.regress:
        fit = experiments.linear_fit([(p.complexity, p.completion) for p in points])
        print(f"linear fit: completion = {fit.slope:.6f}*h + {fit.intercept:.6f}, "
              f"r^2 = {fit.r_squared:.4f}")
    return 0


def cmd_plan(args) -> int:
    c, code = _load_curriculum(args.file)
    if c is None:
        return code
    constraints = planner.PlanConstraints(
        num_terms=args.terms,
        max_credits_per_term=args.max_credits if args.max_credits else math.inf,
        min_credits_per_term=args.min_credits)
    try:
        plan = planner.generate_plan(c, constraints, strategy=args.strategy)
    except planner.PlanInfeasibleError as e:
        print(f"infeasible: {e}", file=sys.stderr)
        return 1
    profile = planner.plan_profile(c, plan)
    if args.format == "machine":
        print(json.dumps({"name": plan.name,
                          "terms": [list(t) for t in plan.terms],
                          "profile": io_formats.profile_to_dict(profile)}))
        return 0
    print(f"plan {plan.name!r} for {c.name} ({len(plan.terms)} terms, "
          f"strategy {args.strategy})")
    for k, term in enumerate(plan.terms, 1):
        courses = ", ".join(term) if term else "(empty)"
        print(f"term {k}: {courses}  "
              f"[{profile.term_credits[k - 1]:g} credits, "
              f"complexity {profile.term_complexity[k - 1]}]")
    print(f"max term complexity: {profile.max_term_complexity}; "
          f"variance: {profile.complexity_variance:.2f}")
    return 0


def cmd_export_dot(args) -> int:
    c, code = _load_curriculum(args.file)
    if c is None:
        return code
    try:
        dot = io_formats.export_dot(c, cluster_by_plan=args.cluster_by_plan,
                                    highlight_longest_paths=args.highlight_longest_paths,
                                    shade_blocked_by=args.shade_blocked_by)
    except KeyError as e:
        print(f"error: {e.args[0]}", file=sys.stderr)
        return 1
    if args.output:
        try:
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(dot)
        except OSError as e:
            print(f"error: cannot write {args.output}: {e.strerror}", file=sys.stderr)
            return 2
    else:
        print(dot, end="")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(data_dir=args.data_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


# -- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="currikit",
        description="Curriculum analytics: complexity metrics, progression "
                    "simulation, and degree-plan tools.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate a curriculum file")
    p.add_argument("file")
    p.add_argument("--lenient", action="store_true",
                   help="downgrade unknown file fields to warnings")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("metrics", help="structural complexity factors")
    p.add_argument("file")
    p.add_argument("--per-course", action="store_true",
                   help="include the per-course factor table")
    p.add_argument("--format", choices=["table", "machine"], default="table",
                   help="table: human-readable (2 decimals); machine: full-precision JSON")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("simulate", help="simulate cohort progression")
    p.add_argument("file")
    p.add_argument("--plan", default="default", help="degree plan name (default: default)")
    p.add_argument("--pass-rates", default="uniform:0.5",
                   help="pass-rate file or uniform:P (default: uniform:0.5)")
    p.add_argument("--mode", choices=sorted(_MODE_ALIASES), default="analytic",
                   help="analytic: marginal recurrence; mc: per-student Monte Carlo; "
                        "exact: joint subset distribution (default: analytic)")
    p.add_argument("--horizon-multiplier", type=float, default=2.0,
                   help="horizon = ceil(multiplier x plan length) terms (default: 2.0)")
    p.add_argument("--students", type=int, default=10_000,
                   help="Monte Carlo cohort size (default: 10000)")
    p.add_argument("--seed", type=int, default=0, help="Monte Carlo seed (default: 0)")
    p.add_argument("--threads", type=int, default=_default_threads(),
                   help="Monte Carlo worker threads (default: CA_THREADS or 1)")
    p.add_argument("--format", choices=["table", "machine"], default="table")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("compare", help="side-by-side totals for two curricula")
    p.add_argument("file_a")
    p.add_argument("file_b")
    p.add_argument("--format", choices=["table", "machine"], default="table")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("enumerate", help="enumerate balanced curricula")
    p.add_argument("--courses", type=int, required=True)
    p.add_argument("--terms", type=int, required=True)
    p.add_argument("--include-coreqs", action="store_true",
                   help="also enumerate within-term coreq edges")
    p.add_argument("--no-dedupe", action="store_true",
                   help="keep within-term relabelings instead of canonical forms")
    p.add_argument("--simulate", action="store_true",
                   help="simulate every member at --pass-rate")
    p.add_argument("--pass-rate", type=float, default=0.5,
                   help="flat pass rate for --simulate (default: 0.5)")
    p.add_argument("--horizon", type=int, default=None,
                   help="horizon terms for --simulate (default: 2 x terms)")
    p.add_argument("--mode", choices=sorted(_MODE_ALIASES), default="analytic")
    p.add_argument("--students", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--regress", action="store_true",
                   help="least-squares fit of completion against complexity")
    p.add_argument("--csv", default=None, help="write study rows as CSV to this path")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("plan", help="construct a degree plan")
    p.add_argument("file")
    p.add_argument("--terms", type=int, required=True)
    p.add_argument("--max-credits", type=float, default=None,
                   help="per-term credit cap (default: unbounded)")
    p.add_argument("--min-credits", type=float, default=0.0,
                   help="per-term credit floor (default: 0)")
    p.add_argument("--strategy", choices=["frontload", "balanced"], default="balanced",
                   help="frontload: hardest courses earliest; balanced: even out "
                        "per-term complexity (default: balanced)")
    p.add_argument("--format", choices=["table", "machine"], default="table")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("export-dot", help="emit a DOT graph description")
    p.add_argument("file")
    p.add_argument("--cluster-by-plan", default=None, metavar="PLAN",
                   help="group nodes into one cluster per term of this plan")
    p.add_argument("--highlight-longest-paths", action="store_true")
    p.add_argument("--shade-blocked-by", default=None, metavar="COURSE",
                   help="fill every course blocked by this one")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_export_dot)

    p = sub.add_parser("serve", help="run the HTTP API and web UI")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--data-dir", default=None,
                   help="persist curricula as files in this directory")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
