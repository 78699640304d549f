"""Command-line driver.

Commands: run, oracle, analyze, optimize, plan, demo.  Exit status is 0 on
success, 1 on user errors, 2 on internal invariant failures.
"""

from __future__ import annotations

import argparse
import random
import sys
from pathlib import Path

from .engine import run_insideout
from .errors import FAQUserError, InternalError
from .frontend import (
    format_output,
    format_query,
    load_instance,
    parse_query,
    write_factor_table,
)
from .hypergraph import tree_decomposition_from_ordering
from .optimizer import (
    identity_ordering,
    optimize_ordering,
    ordering_width,
    validate_ordering,
)
from .oracle import brute_force_eval
from .plan import emit_plan
from . import reductions


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="faq",
        description="Evaluate and analyze aggregate queries over semirings.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, data=True):
        p.add_argument("-q", "--query", required=True, help="query file")
        if data:
            p.add_argument("-d", "--data", default=None, help="data directory")
            p.add_argument(
                "--header", action="store_true", help="skip one header line per file"
            )

    p_run = sub.add_parser("run", help="evaluate a query")
    add_common(p_run)
    p_run.add_argument("-o", "--out", default=None, help="output file (default stdout)")
    p_run.add_argument("--order", default="auto", help="auto | exact | v1,v2,...")
    p_run.add_argument("--cap", type=int, default=10_000)
    p_run.add_argument("--stats", action="store_true", help="per-step stats on stderr")
    p_run.add_argument("--no-projections", action="store_true")
    p_run.add_argument("--seed", type=int, default=None, help="unused; accepted for parity")

    p_oracle = sub.add_parser("oracle", help="brute-force reference evaluation")
    add_common(p_oracle)
    p_oracle.add_argument("-o", "--out", default=None)

    p_analyze = sub.add_parser("analyze", help="width report without touching data")
    add_common(p_analyze, data=False)
    p_analyze.add_argument("--order", default="auto")
    p_analyze.add_argument("--cap", type=int, default=10_000)

    p_opt = sub.add_parser("optimize", help="search for a low-width ordering")
    add_common(p_opt, data=False)
    p_opt.add_argument("--mode", choices=("exact", "greedy"), default="exact")
    p_opt.add_argument("--cap", type=int, default=10_000)

    p_plan = sub.add_parser("plan", help="emit the rewrite-rule script")
    add_common(p_plan)
    p_plan.add_argument("--order", default="auto")
    p_plan.add_argument("--cap", type=int, default=10_000)
    p_plan.add_argument("--no-projections", action="store_true")

    p_demo = sub.add_parser("demo", help="write a demo query + data files")
    p_demo.add_argument("kind", choices=("mcm", "map", "qcq"))
    p_demo.add_argument("-o", "--out", required=True, help="output directory")
    p_demo.add_argument("--seed", type=int, default=0)
    return parser


def _resolve_ordering(query, spec: str, cap: int):
    if spec == "auto":
        return optimize_ordering(query, mode="greedy", cap=cap).ordering
    if spec == "exact":
        return optimize_ordering(query, mode="exact", cap=cap).ordering
    if spec == "identity":
        return identity_ordering(query)
    return validate_ordering(query, [v.strip() for v in spec.split(",")])


def _emit(text: str, out_path):
    if out_path is None:
        sys.stdout.write(text)
    else:
        Path(out_path).write_text(text, encoding="utf-8")


def _print_stats(result, stream):
    stream.write("# step\tvar\t|U|\tparticipants\tbindings\tout_rows\n")
    for i, rec in enumerate(result.trace):
        if rec.kind in ("semiring", "final-join"):
            sizes = ",".join(str(p.size) for p in rec.participants)
            u = len(rec.u_vars) if rec.u_vars else len(rec.produced_vars or ())
            stream.write(
                f"{i}\t{rec.var or 'output'}\t{u}\t[{sizes}]\t"
                f"{rec.bindings_expanded}\t{rec.output_size}\n"
            )
        elif rec.kind == "product":
            stream.write(
                f"{i}\t{rec.var}\tproduct\t"
                f"[{len(rec.marginalized)} marg, {len(rec.powered)} pow]\t0\t-\n"
            )
        elif rec.kind == "isolated":
            stream.write(f"{i}\t{rec.var}\tisolated\t[]\t0\t-\n")


def _format_ordering(ordering) -> str:
    return ",".join(ordering.variables)


def _cmd_run(args) -> int:
    instance = load_instance(args.query, args.data, header=args.header)
    ordering = _resolve_ordering(instance.query, args.order, args.cap)
    result = run_insideout(
        instance, ordering, use_projections=not args.no_projections
    )
    _emit(format_output(instance, result.output), args.out)
    if args.stats:
        sys.stderr.write(f"# order: {_format_ordering(ordering)}\n")
        _print_stats(result, sys.stderr)
    return 0


def _cmd_oracle(args) -> int:
    instance = load_instance(args.query, args.data, header=args.header)
    output = brute_force_eval(instance)
    _emit(format_output(instance, output), args.out)
    return 0


def _cmd_analyze(args) -> int:
    query = parse_query(Path(args.query).read_text(encoding="utf-8"))
    ordering = _resolve_ordering(query, args.order, args.cap)
    analysis = ordering_width(query, ordering)
    out = sys.stdout
    out.write(f"order: {_format_ordering(ordering)}\n")
    out.write("step\tvar\tmode\tU\tsubquery-edges\trho*\n")
    for i, step in enumerate(analysis.steps):
        edges = " ".join(
            f"{e.name}{{{','.join(sorted(e.vars))}}}" for e in step.subquery_edges
        )
        rho = str(step.rho) if step.rho is not None else "-"
        out.write(
            f"{i}\t{step.var}\t{step.mode}\t"
            f"{{{','.join(sorted(step.U))}}}\t{edges}\t{rho}\n"
        )
    out.write(f"faqw: {analysis.faqw}\n")
    td = tree_decomposition_from_ordering(query.hypergraph(), ordering.variables)
    out.write("decomposition {\n")
    for i, bag in enumerate(td.bags):
        out.write(f"  bag{i} [{','.join(sorted(bag))}] width={td.widths[i]};\n")
    for i, j in td.edges:
        out.write(f"  bag{i} -- bag{j};\n")
    out.write("}\n")
    return 0


def _cmd_optimize(args) -> int:
    query = parse_query(Path(args.query).read_text(encoding="utf-8"))
    result = optimize_ordering(query, mode=args.mode, cap=args.cap)
    out = sys.stdout
    if result.cap_exceeded:
        sys.stderr.write(
            f"warning: more than {args.cap} orderings; fell back to greedy\n"
        )
    out.write(f"order: {_format_ordering(result.ordering)}\n")
    out.write(f"mode: {result.mode_used}\n")
    out.write("var\tmode\trho*\n")
    for step in result.analysis.steps:
        rho = str(step.rho) if step.rho is not None else "-"
        out.write(f"{step.var}\t{step.mode}\t{rho}\n")
    out.write(f"faqw: {result.width}\n")
    return 0


def _cmd_plan(args) -> int:
    instance = load_instance(args.query, args.data, header=args.header)
    ordering = _resolve_ordering(instance.query, args.order, args.cap)
    result = run_insideout(
        instance, ordering, use_projections=not args.no_projections
    )
    sys.stdout.write(emit_plan(result.trace))
    return 0


def _cmd_demo(args) -> int:
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    rng = random.Random(args.seed)
    if args.kind == "mcm":
        matrices = reductions.random_mcm_chain(rng)
        instance = reductions.mcm_instance(matrices)
    elif args.kind == "map":
        instance = reductions.map_instance(
            edges={"P1": ("u", "v"), "P2": ("v", "w")},
            rows={
                "P1": {(i, j): rng.randint(0, 5) for i in range(3) for j in range(3)},
                "P2": {(i, j): rng.randint(0, 5) for i in range(3) for j in range(3)},
            },
            free=("u",),
        )
    else:
        quantifiers, relations, free = reductions.random_qcq(rng)
        instance = reductions.qcq_count_instance(quantifiers, relations, free)
    query_path = outdir / "query.faq"
    query_path.write_text(format_query(instance.query), encoding="utf-8")
    for decl in instance.query.factors:
        write_factor_table(
            outdir / decl.path, decl, instance.factors[decl.name], instance
        )
    sys.stdout.write(f"wrote {query_path}\n")
    return 0


_COMMANDS = {
    "run": _cmd_run,
    "oracle": _cmd_oracle,
    "analyze": _cmd_analyze,
    "optimize": _cmd_optimize,
    "plan": _cmd_plan,
    "demo": _cmd_demo,
}


def execute_command(argv) -> int:
    """Run one CLI invocation; returns the exit status."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0
    try:
        return _COMMANDS[args.command](args)
    except FAQUserError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    except FileNotFoundError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    except InternalError as exc:
        sys.stderr.write(f"internal error: {exc}\n")
        return 2


def main() -> None:
    sys.exit(execute_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
