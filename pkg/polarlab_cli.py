"""
Command-line front end for polarlab.

    python polarlab_cli.py validate matrix.csv
    python polarlab_cli.py analyze-mueller matrix.json --probe 0,0,1
    python polarlab_cli.py analyze-channel damping.json
    python polarlab_cli.py synth ensemble.json --probe 1,0,0,0
    python polarlab_cli.py synth --seed 7 --rank 2
    python polarlab_cli.py sweep --family retarder-pair --grid 0:3:200

Exit status: 0 ok, 2 nonphysical, 3 no coherent core, 4 parse error,
5 phase undefined, 1 anything else.
"""
import argparse
import logging
import os
import sys
from pathlib import Path
from typing import List, Optional

# Add project root to path
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from polarlab.config import (
    BUILTIN_FAMILIES,
    CLAMP_TOL,
    COHERENT_CORE_TOL,
    DEFAULT_OUTPUT_DIR,
    DEGENERATE_GAP_TOL,
    HERMITIAN_TOL,
    NONREGULAR_TOL,
    PHASE_UNDEFINED_TOL,
    PI_BRANCH_TOL,
    SINGULAR_TOL,
    SUBCOMMAND_MODES,
    TP_TOL,
    VERSION,
    Tolerances,
    get_exit_code,
)
from polarlab.errors import ParseError, PolarLabError
from polarlab.schemas import AnalysisRequest, GridSpec
from polarlab.services.analyzer import Analyzer
from polarlab.services.file_manager import FileManager, parse_probe_text

logger = logging.getLogger("polarlab_cli")

LOG_FORMAT = "[%(name)s] %(levelname)s: %(message)s"

# flag -> (Tolerances field, default)
TOLERANCE_FLAGS = {
    "--hermitian-tol": ("hermitian", HERMITIAN_TOL),
    "--clamp-tol": ("clamp", CLAMP_TOL),
    "--gap-tol": ("degenerate_gap", DEGENERATE_GAP_TOL),
    "--singular-tol": ("singular", SINGULAR_TOL),
    "--pi-tol": ("pi_branch", PI_BRANCH_TOL),
    "--core-tol": ("coherent_core", COHERENT_CORE_TOL),
    "--nonregular-tol": ("nonregular", NONREGULAR_TOL),
    "--phase-tol": ("phase_undefined", PHASE_UNDEFINED_TOL),
    "--tp-tol": ("tp", TP_TOL),
}


class CliParser(argparse.ArgumentParser):
    """Usage errors exit with 1; 2 is reserved for nonphysical input."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def add_common_arguments(parser: argparse.ArgumentParser):
    parser.add_argument(
        "--probe", "-p",
        action="append",
        default=[],
        help="Probe state: spinor re,im,re,im or Bloch vector x,y,z (repeatable)"
    )
    parser.add_argument("--out", "-o", help="Output file (default: stdout); output directory with --batch")
    parser.add_argument(
        "--format", "-f",
        choices=["structured-report", "table"],
        help="structured-report (JSON) or table (CSV); sweep defaults to table"
    )
    parser.add_argument("--batch", action="store_true", help="Treat INPUT as a directory and analyze every file in it")
    parser.add_argument("--workers", type=int, default=4, help="Worker threads for --batch (default: 4)")
    parser.add_argument("--verbose", "-v", action="store_true", help="Debug logging")
    for flag, (field, default) in TOLERANCE_FLAGS.items():
        parser.add_argument(flag, dest=f"tol_{field}", type=float, default=default, help=f"(default: {default})")


def build_parser() -> argparse.ArgumentParser:
    parser = CliParser(
        prog="polarlab",
        description="Characteristic-core analysis of Mueller matrices and qubit channels"
    )
    parser.add_argument("--version", action="version", version=f"polarlab {VERSION}")
    subparsers = parser.add_subparsers(dest="command", required=True)

    sub = subparsers.add_parser("validate", help="Physical realizability verdict")
    sub.add_argument("input", help="Mueller CSV grid or JSON document")
    add_common_arguments(sub)

    sub = subparsers.add_parser("analyze-mueller", help="Characteristic decomposition, generator and phases")
    sub.add_argument("input", help="Mueller CSV grid or JSON document")
    add_common_arguments(sub)

    sub = subparsers.add_parser("analyze-channel", help="Qubit channel from a Kraus or Choi document")
    sub.add_argument("input", help="JSON document with 'kraus' or 'choi'")
    add_common_arguments(sub)

    sub = subparsers.add_parser("synth", help="Mueller matrix from a Jones ensemble or a seed")
    sub.add_argument("input", nargs="?", help="JSON document with 'jones_ensemble'")
    sub.add_argument("--seed", type=int, help="Seed for a random physical Mueller matrix")
    sub.add_argument("--rank", type=int, default=4, help="Covariance rank for --seed (default: 4)")
    add_common_arguments(sub)

    sub = subparsers.add_parser("sweep", help="Visibility curve of an ensemble family")
    sub.add_argument("input", nargs="?", help="JSON document with 'retarder_family'")
    sub.add_argument("--family", choices=BUILTIN_FAMILIES, help="Builtin ensemble family")
    sub.add_argument("--grid", "-g", required=True, help="start:stop:count")
    add_common_arguments(sub)

    return parser


def build_request(args: argparse.Namespace) -> AnalysisRequest:
    mode = SUBCOMMAND_MODES[args.command]
    tolerances = Tolerances(**{field: getattr(args, f"tol_{field}") for field, _ in TOLERANCE_FLAGS.values()})
    fmt = args.format or ("table" if mode == "sweep" else "structured-report")
    grid = GridSpec.parse(args.grid) if getattr(args, "grid", None) else None
    return AnalysisRequest(
        mode=mode,
        input_path=args.input,
        probes=[parse_probe_text(p) for p in args.probe],
        grid=grid,
        family=getattr(args, "family", None),
        output_path=args.out,
        format=fmt,
        seed=getattr(args, "seed", None),
        rank=getattr(args, "rank", 4),
        tolerances=tolerances,
    )


def report_error(report):
    if report.error is not None:
        print(f"polarlab: {report.error['code']}: {report.error['message']}", file=sys.stderr)


def run_batch(analyzer: Analyzer, req: AnalysisRequest, workers: int) -> int:
    directory = Path(req.input_path)
    if not directory.is_dir():
        raise ParseError(f"--batch needs a directory, got {directory}")
    writer = FileManager(req.output_path or DEFAULT_OUTPUT_DIR)

    status = 0
    for path, report in analyzer.run_batch(req, directory, max_workers=workers):
        writer.save_report(report, writer.report_path(path, req.format, root=directory), req.format)
        report_error(report)
        status = max(status, report.exit_code)
    return status


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format=LOG_FORMAT)

    try:
        req = build_request(args)
        analyzer = Analyzer(req.tolerances)
        if args.batch:
            return run_batch(analyzer, req, args.workers)

        report = analyzer.run_request(req)
        content = FileManager().save_report(report, req.output_path, req.format)
        if req.output_path is None:
            sys.stdout.write(content)
        report_error(report)
        return report.exit_code

    except PolarLabError as e:
        print(f"polarlab: {e.code}: {e.message}", file=sys.stderr)
        return e.exit_code
    except ValueError as e:
        # malformed flags (grid spec, request validation)
        print(f"polarlab: parse_error: {e}", file=sys.stderr)
        return get_exit_code("parse_error")
    except Exception as e:
        logger.exception(f"Unexpected failure: {e}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
