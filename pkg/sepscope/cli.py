"""
Command-line interface.

Usage:
    sepscope analyze --family rho_alpha --alpha 4 --dim 8
    sepscope analyze --file bell.mat --csv -
    sepscope generate --family werner_mc --m 3 --c -0.5 --out werner.mat
    sepscope sweep --family rho_t_alpha --alpha 4 --grid t:0.1:0.9:9 --dims 6,8,12
    sepscope sweep --plan plans/rho_eps_c.yaml --csv out.csv
    sepscope verify-paper

Exit codes:
    0  success (whatever the verdicts)
    1  verify-paper found a failing anchor
    2  usage, parse or validation error
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv

from .anchors import DEFAULT_SEED, run_anchors, summary
from .config import get_settings
from .criteria import CriterionReport, DensityMatrix, full_report
from .errors import InsufficientDimsError, SepscopeError
from .io import (
    ReportRow,
    emit_matrix,
    emit_report_csv,
    parse_density_matrix,
    parse_state_spec,
    report_rows_from_sweep,
)
from .log import log_run
from .states import StateFamily, StateSpec, WeightScheme, build_state, example39_weights
from .truncation import GridAxis, SweepPlan, run_sweep, stability_report

logger = logging.getLogger("sepscope.cli")

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2

# Flag name -> StateSpec parameter name
PARAM_FLAGS = {
    "alpha": "alpha",
    "t": "t",
    "c": "c",
    "m": "m",
    "eps": "eps",
    "p": "p",
    "q1": "q1",
    "q2": "q2",
    "q3": "q3",
    "q4": "q4",
    "start": "start",
}


class UsageError(SepscopeError):
    """Raised for flag combinations argparse cannot express."""
    pass


def _fmt(value: float) -> str:
    return f"{value:.12g}"


def _add_state_flags(parser: argparse.ArgumentParser, with_sources: bool = True) -> None:
    if with_sources:
        parser.add_argument("--file", help="Matrix file to read")
        parser.add_argument("--spec", help="StateSpec file (key=value lines)")
    parser.add_argument("--family", choices=[f.value for f in StateFamily], help="Generator family")
    parser.add_argument("--dim", type=int, help="Truncation dimension")
    parser.add_argument("--r", type=float, help="Geometric tail ratio in (0, 1)")
    parser.add_argument("--scheme", choices=[s.value for s in WeightScheme],
                        help="Derive q2..q4 from --q1 for the cyclic 4x4 families")
    for flag in PARAM_FLAGS:
        parser.add_argument(f"--{flag}", type=float, help=f"Family parameter {flag}")


def _spec_from_flags(args: argparse.Namespace) -> StateSpec:
    params = {
        name: getattr(args, flag)
        for flag, name in PARAM_FLAGS.items()
        if getattr(args, flag, None) is not None
    }
    if args.scheme:
        if "q1" not in params:
            raise UsageError("--scheme needs --q1")
        q = example39_weights(params["q1"], WeightScheme(args.scheme))
        params.update({f"q{i}": value for i, value in enumerate(q, start=1)})
    return StateSpec(family=StateFamily(args.family), params=params, truncation_dim=args.dim, ratio=args.r)


def _load_state(args: argparse.Namespace) -> tuple[DensityMatrix, Optional[StateSpec], str]:
    """Resolve exactly one input source to (state, spec or None, label)."""
    sources = [name for name in ("file", "spec", "family") if getattr(args, name)]
    if len(sources) != 1:
        raise UsageError("give exactly one of --file, --spec, --family")

    if args.file:
        text = Path(args.file).read_text()
        return parse_density_matrix(text), None, args.file

    if args.spec:
        spec = parse_state_spec(Path(args.spec).read_text())
        if args.dim is not None:
            spec = spec.with_params(dim=args.dim)
    else:
        spec = _spec_from_flags(args)

    label = f"{spec.family.value} {spec.describe()} (d={spec.dim()})".replace(";", " ")
    return build_state(spec), spec, label


def _write_output(text: str, target: Optional[str]) -> None:
    if target is None or target == "-":
        sys.stdout.write(text)
    else:
        Path(target).write_text(text)


def _print_report(label: str, report: CriterionReport) -> None:
    rows = [
        ("state", label),
        ("realign trace norm", _fmt(report.realignment_trace_norm)),
        ("ccn", _fmt(report.ccn)),
        ("ppt min eigenvalue", _fmt(report.ppt_min_eigenvalue)),
        ("symmetric", "yes" if report.is_symmetric else "no"),
        ("schmidt rank", str(report.schmidt_rank)),
        ("purity", _fmt(report.purity)),
        ("RCCN", report.rccn_verdict.label("rccn")),
        ("PPT", report.ppt_verdict.label("ppt")),
    ]
    width = max(len(key) for key, _ in rows) + 2
    for key, value in rows:
        print(f"{key + ':':<{width}}{value}")


# =============================================================================
# Commands
# =============================================================================

def cmd_analyze(args: argparse.Namespace) -> int:
    """Print the criterion report for one state."""
    rho, spec, label = _load_state(args)
    report = full_report(rho)

    if args.json:
        print(json.dumps({"state": label, **report.to_dict()}, indent=2))
    elif args.csv != "-":
        _print_report(label, report)

    if args.csv:
        if spec is not None:
            row = ReportRow.from_report(spec.family.value, spec.params, spec.dim(), report)
        else:
            row = ReportRow.from_report("file", {}, rho.dims.dA, report)
        _write_output(emit_report_csv([row]), args.csv)
    return EXIT_OK


def cmd_generate(args: argparse.Namespace) -> int:
    """Write a generated state as a matrix file."""
    if not args.family and not args.spec:
        raise UsageError("give one of --family, --spec")
    rho, _, label = _load_state(args)
    _write_output(emit_matrix(rho.matrix, rho.dims, comment=label), args.out)
    return EXIT_OK


def _plan_from_flags(args: argparse.Namespace) -> SweepPlan:
    if args.plan:
        if args.family:
            raise UsageError("give either --plan or --family, not both")
        plan = SweepPlan.from_yaml(Path(args.plan))
    else:
        if not args.family:
            raise UsageError("sweep needs --family or --plan")
        try:
            dims = [int(d) for d in args.dims.split(",")] if args.dims else ([args.dim] if args.dim else [])
        except ValueError as e:
            raise UsageError(f"bad --dims: {e}") from e
        plan = SweepPlan(
            spec_template=_spec_from_flags(args),
            varying=[GridAxis.parse(text) for text in args.grid or []],
            dims=dims,
        )
    return plan


def cmd_sweep(args: argparse.Namespace) -> int:
    """Run a parameter/dimension sweep and emit CSV."""
    plan = _plan_from_flags(args)

    threads = args.threads or get_settings().worker_count()
    result = run_sweep(plan, threads=threads)
    _write_output(emit_report_csv(report_rows_from_sweep(result)), args.csv)

    if result.error_count:
        print(f"warning: {result.error_count} sweep point(s) failed", file=sys.stderr)

    stability = None
    if len(plan.dims) > 1 and result.error_count < len(result.rows):
        try:
            stability = stability_report(result)
        except InsufficientDimsError as e:
            print(f"warning: no stability report: {e}", file=sys.stderr)
        else:
            print(f"max norm drift across dims {plan.dims}: {stability.max_drift:.3e}", file=sys.stderr)

    log_path = log_run("sweeps", plan.spec_template.family.value, {
        "threads": threads,
        "result": result.to_dict(),
        "stability": stability.to_dict() if stability else None,
    })
    if log_path:
        logger.debug("sweep logged to %s", log_path)
    return EXIT_OK


def cmd_verify_paper(args: argparse.Namespace) -> int:
    """Run every reference anchor; exit 1 if any fails."""
    threads = args.threads or get_settings().worker_count()
    anchors = run_anchors(seed=args.seed, threads=threads)
    totals = summary(anchors)

    if args.json:
        print(json.dumps([a.to_dict() for a in anchors], indent=2))
    else:
        for a in anchors:
            status = "PASS" if a.passed else "FAIL"
            print(
                f"{status}  [{a.group}] {a.name}: computed={_fmt(a.computed)} "
                f"expected={_fmt(a.expected)} ({a.comparison}, tol={a.tolerance:.0e})"
            )
        print(f"\n{totals['passed']}/{totals['total']} anchors passed")

    log_run("verify", "anchors", {"seed": args.seed, **totals})
    return EXIT_OK if totals["passed"] == totals["total"] else EXIT_VERIFY_FAILED


# =============================================================================
# Parser
# =============================================================================

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sepscope",
        description="Realignment (CCN) and PPT separability checks for bipartite states",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Report for a generated state
  sepscope analyze --family rho_alpha --alpha 4 --dim 8

  # Report for a matrix file, as CSV on stdout
  sepscope analyze --file bell.mat --csv -

  # Cyclic 4x4 family with weights derived from q1
  sepscope analyze --family example39_rho --q1 0.125 --scheme non-ppt --dim 4

  # Sweep alpha at fixed dimension
  sepscope sweep --family rho_alpha --grid alpha:2:5:7 --dims 4

  # Check truncation stability
  sepscope sweep --family rho_eps_c --m 3 --c -0.2 --grid eps:0:0.7:3 --dims 6,8,12

  # Reference checks
  sepscope verify-paper
""",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="Debug logging on stderr")
    subparsers = parser.add_subparsers(dest="command")

    analyze = subparsers.add_parser("analyze", help="Report criteria for one state")
    _add_state_flags(analyze)
    analyze.add_argument("--csv", help="Also write a CSV report ('-' for stdout only)")
    analyze.add_argument("--json", action="store_true", help="Print the report as JSON")
    analyze.set_defaults(func=cmd_analyze)

    generate = subparsers.add_parser("generate", help="Write a generated state as a matrix file")
    _add_state_flags(generate)
    generate.add_argument("--out", "-o", help="Output path (default: stdout)")
    generate.set_defaults(func=cmd_generate)

    sweep = subparsers.add_parser("sweep", help="Sweep parameters and truncation dims")
    _add_state_flags(sweep, with_sources=False)
    sweep.add_argument("--grid", action="append", help="Varying parameter as name:lo:hi:n (repeatable)")
    sweep.add_argument("--dims", help="Comma-separated truncation dims, strictly increasing")
    sweep.add_argument("--plan", help="YAML sweep plan file")
    sweep.add_argument("--csv", default="-", help="CSV output path (default: stdout)")
    sweep.add_argument("--threads", type=int, help="Worker threads (default: SEPSCOPE_THREADS or CPU count)")
    sweep.set_defaults(func=cmd_sweep)

    verify = subparsers.add_parser("verify-paper", help="Run every reference anchor")
    verify.add_argument("--seed", type=int, default=DEFAULT_SEED, help="Seed for the randomized suites")
    verify.add_argument("--threads", type=int, help="Worker threads for the truncation sweeps (default: SEPSCOPE_THREADS or CPU count)")
    verify.add_argument("--json", action="store_true", help="Print anchors as JSON")
    verify.set_defaults(func=cmd_verify_paper)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    load_dotenv()
    parser = build_parser()

    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )

    if not args.command:
        parser.print_help(sys.stderr)
        return EXIT_USAGE

    try:
        return args.func(args)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (SepscopeError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
