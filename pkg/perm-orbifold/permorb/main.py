"""
Permorb CLI
Main entry point for validating modular data and computing cyclic permutation orbifolds.
"""

import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional

from dotenv import load_dotenv
from loguru import logger

# Load environment variables from a .env file
load_dotenv()

from .config import Engine, ReportFormat, RunConfig, Settings, build_run_config
from .errors import PermorbError, VerificationError
from .services.modular_data import (
    BUILTINS,
    ModularData,
    builtin,
    describe,
    dumps,
    global_dimension,
    load,
    validate,
)
from .services.orbifold import catalog, orbifold_s_matrix
from .services.scalars import precision_scope
from .services.verify import (
    VerificationReport,
    build_report,
    count_oracle,
    orbifold_suite,
    render,
    render_table,
    witness_check,
)

settings = Settings()


def configure_logging(level: str) -> None:
    logger.remove()
    logger.add(sys.stderr, level=level.upper(), format="<level>{level: <8}</level> | {message}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("input", nargs="?", help="modular data JSON file")
    common.add_argument("--builtin", help=f"builtin modular data: {', '.join(BUILTINS)}")
    common.add_argument("--c", dest="central_charge", help="central charge P/Q for --builtin holomorphic")
    common.add_argument("--n", type=int, help="N for --builtin z_n")
    common.add_argument("-k", type=int, default=1, help="cycle length of the permutation")
    common.add_argument("--precision", type=int, default=settings.precision, help="working precision in digits")
    common.add_argument("--tol", type=float, default=settings.tolerance, help="comparison tolerance")
    common.add_argument("--engine", choices=[e.value for e in Engine], default=Engine.THEOREM.value)
    common.add_argument("-o", "--output", help="write the orbifold data to this file")
    common.add_argument("--format", dest="report_format", choices=[f.value for f in ReportFormat],
                        default=ReportFormat.HUMAN.value)

    parser = argparse.ArgumentParser(prog="permorb", description="Modular data of cyclic permutation orbifolds")
    commands = parser.add_subparsers(dest="command", required=True)
    commands.add_parser("validate", parents=[common], help="check the axioms of input modular data")
    commands.add_parser("builtins", help="list builtin modular data")
    commands.add_parser("orbifold", parents=[common], help="compute the orbifold S and T data")
    commands.add_parser("catalog", parents=[common], help="list the irreducible orbifold modules")
    commands.add_parser("verify", parents=[common], help="run both engines and all orbifold checks")
    return parser


def resolve_input(config: RunConfig) -> ModularData:
    if config.input_path is not None:
        return load(config.input_path)
    return builtin(config.builtin, c=config.central_charge, n=config.n)


def require_passed(report: VerificationReport) -> None:
    if not report.passed:
        failed = [check.name for check in report.checks if not check.passed]
        if report.counts is not None and report.counts[0] != report.counts[1]:
            failed.append("count_oracle")
        raise VerificationError(f"Verification of '{report.subject}' failed", detail=", ".join(failed))


def cmd_validate(config: RunConfig) -> int:
    md = resolve_input(config)
    report = validate(md, config.tolerance)
    summary = describe(md, config.tolerance) if report.passed else None
    out = build_report(md.name, 1, config.precision, config.tolerance, md.rank, report.checks, summary=summary)
    print(render(out, config.report_format))
    require_passed(out)
    return 0


def cmd_builtins() -> int:
    rows = []
    with precision_scope(settings.precision):
        for name in BUILTINS:
            md = builtin(name)
            rows.append({"name": name, "example": md.name, "rank": md.rank,
                         "c": str(md.central_charge), "D^2": f"{float(global_dimension(md)):.6g}"})
    print(render_table(rows))
    return 0


def cmd_catalog(config: RunConfig) -> int:
    md = resolve_input(config)
    modules = catalog(md, config.k, config.budget, config.max_k)
    rows = [
        {"family": int(m.family), "sector": m.sector, "tuple": list(m.labels), "eigen": m.eigen,
         "weight": str(m.weight), "label": m.name}
        for m in modules
    ]
    if config.report_format == ReportFormat.MACHINE:
        print(json.dumps(rows, indent=2))
    else:
        print(render_table(rows))
    return 0


def _input_check(md: ModularData, config: RunConfig) -> None:
    report = validate(md, config.tolerance)
    if not report.passed:
        logger.warning(f"Input '{md.name}' fails {', '.join(report.failed())}; continuing with the orbifold")


def cmd_orbifold(config: RunConfig) -> int:
    md = resolve_input(config)
    _input_check(md, config)
    result = orbifold_s_matrix(md, config.k, config.engine, config.tolerance, config.budget, config.max_k)
    if config.output:
        Path(config.output).write_text(dumps(result.to_file_model()), encoding="utf-8")
        logger.info(f"Wrote {result.size}x{result.size} orbifold data to {config.output}")
    suite = orbifold_suite(md, result, config.tolerance)
    report = build_report(result.name, config.k, config.precision, config.tolerance, result.size,
                          suite.checks, diff=result.engine_diff)
    print(render(report, config.report_format))
    require_passed(report)
    return 0


def cmd_verify(config: RunConfig) -> int:
    md = resolve_input(config)
    _input_check(md, config)
    result = orbifold_s_matrix(md, config.k, Engine.BOTH, config.tolerance, config.budget, config.max_k)
    suite = orbifold_suite(md, result, config.tolerance)
    if config.k > 1:
        suite.checks.append(witness_check(md, config.k, config.tolerance))
    counts = count_oracle(md, config.k, config.budget, config.max_k)
    report = build_report(result.name, config.k, config.precision, config.tolerance, result.size,
                          suite.checks, counts=counts, diff=result.engine_diff)
    print(render(report, config.report_format))
    require_passed(report)
    return 0


COMMANDS = {
    "validate": cmd_validate,
    "orbifold": cmd_orbifold,
    "catalog": cmd_catalog,
    "verify": cmd_verify,
}


def main(argv: Optional[List[str]] = None) -> int:
    configure_logging(settings.log_level)
    args = build_parser().parse_args(argv)
    try:
        if args.command == "builtins":
            return cmd_builtins()
        config = build_run_config(
            input_path=args.input,
            builtin=args.builtin,
            central_charge=args.central_charge,
            n=args.n,
            k=args.k,
            precision=args.precision,
            tolerance=args.tol,
            engine=args.engine,
            output=args.output,
            report_format=args.report_format,
            budget=settings.budget,
            max_k=settings.max_k,
        )
        logger.info(f"Running {args.command} on {config.input_path or config.builtin} with k={config.k}")
        with precision_scope(config.precision):
            return COMMANDS[args.command](config)
    except PermorbError as e:
        logger.error(f"{type(e).__name__}: {str(e)}")
        return e.exit_code
    except Exception as e:
        logger.exception(f"Unexpected error: {str(e)}")
        return 2


if __name__ == "__main__":
    sys.exit(main())
