"""Command-line entry point: ccr-forge <command> <spec-file> [options]."""

import argparse
import logging
import sys
from typing import Any, Dict, List, Optional, Sequence

from ccr_forge.config_manager import load_spec
from ccr_forge.crossed_product import GramNotIdentityError
from ccr_forge.engine import COMMANDS, VerificationEngine
from ccr_forge.exporter import to_json
from ccr_forge.projective_action import AxiomFailureError
from ccr_forge.reports import AxiomReport

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INPUT_ERROR = 2

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ccr-forge",
        description="Verify twisted crossed products, Weyl relations and CCR phases "
        "described by a JSON problem spec",
    )
    parser.add_argument("command", choices=COMMANDS, help="Verification or construction to run")
    parser.add_argument("spec", help="Path to the problem-spec JSON file")
    parser.add_argument("--tol", type=float, default=None, help="Residual tolerance (1e-10)")
    parser.add_argument("--element", default=None, help="Named element for norm")
    parser.add_argument("--out", default=None, help="Output path for build")
    parser.add_argument(
        "--word",
        action="append",
        default=[],
        help='Weyl word "k1;k2;..." with comma-separated components (repeatable)',
    )
    parser.add_argument("--json", action="store_true", help="Machine-readable output")
    parser.add_argument("--seed", type=int, default=None, help="Random seed for sampled checks")
    parser.add_argument("--verbose", action="store_true", help="Debug logging")
    return parser


def _format_witness(witness: Any) -> str:
    if witness is None:
        return "-"
    return "(" + ", ".join(str(w) for w in witness) + ")"


def format_report(report: Dict[str, Any]) -> List[str]:
    """Human-readable table rows for one serialized AxiomReport."""
    status = "PASS" if report["passed"] else "FAIL"
    lines = [f"{report['title']} [{status}] tolerance {report['tolerance']:.1e}"]
    for entry in report["entries"]:
        mark = "ok" if entry["passed"] else "FAIL"
        note = f"  {entry['note']}" if entry["note"] else ""
        lines.append(
            f"  {entry['axiom']:<22} {entry['residual']:>12.3e}  {mark:<4} "
            f"{_format_witness(entry['witness'])}{note}"
        )
    return lines


def format_result(result: Dict[str, Any]) -> str:
    lines: List[str] = []
    for report in result["reports"]:
        lines.extend(format_report(report))
    for key, value in sorted(result["results"].items()):
        if key == "document":
            continue
        lines.append(f"{key}: {value}")
    summary = result["summary"]
    verdict = "PASSED" if result["passed"] else f"FAILED ({summary['first_failure']})"
    lines.append(
        f"{result['metadata']['command']}: {verdict}, {summary['checks']} checks, "
        f"max residual {summary['max_residual']:.3e}"
    )
    return "\n".join(lines)


def _emit_failure(report: AxiomReport, as_json: bool) -> None:
    if as_json:
        print(to_json({"passed": False, "reports": [report.to_dict()]}))
    else:
        print("\n".join(format_report(report.to_dict())))


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run one command.

    Returns:
        0 when every check passes, 1 when a check fails, 2 on input errors
    """
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )
    overrides = {"tolerance": args.tol, "random_seed": args.seed}
    if args.tol is not None:
        logger.warning(f"Tolerance overridden to {args.tol:.1e}")

    try:
        logger.info(f"Loading problem spec from: {args.spec}")
        spec = load_spec(args.spec)
        engine = VerificationEngine(spec, overrides)
        result = engine.run(args.command, element=args.element, out=args.out, words=args.word)
    except AxiomFailureError as exc:
        logger.error(str(exc))
        _emit_failure(exc.report, args.json)
        return EXIT_FAILED
    except GramNotIdentityError as exc:
        logger.error(str(exc))
        return EXIT_FAILED
    except (ValueError, KeyError, OSError) as exc:
        logger.error(f"Input error: {exc}")
        return EXIT_INPUT_ERROR

    print(to_json(result) if args.json else format_result(result))
    return EXIT_OK if result["passed"] else EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
