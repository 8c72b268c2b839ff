"""
Hecke RPF Verification Driver
=============================

Command-line entry point: checks the Hecke group relations, enumerates
simple cycles, and runs the verification suite for rational period
functions and their remainder terms. Reports go to stdout (or --out);
logs go to stderr.

    python app/main.py group --p 5
    python app/main.py cycle --p 3 --form "[1,1,-1]"
    python app/main.py verify specs/golden_p3_k1.json --which all
    python app/main.py series delta_e6 --terms 50 --out delta_e6.json

Exit codes: 0 all checks pass, 1 some check fails, 2 enumeration could not
be certified at the requested depth, 3 malformed input.
"""

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from algebra.quadratic_forms import QuadraticForm
from analysis.mellin_remainder import FourierSeries
from analysis.qexpansions import TABLE, coefficient_document
from analysis.rpf import RpfSpec
from checks import CheckContext, CheckReport, get_check_manager
from config.config_manager import get_config, get_config_manager, set_config
from utils.errors import (
    DomainError, HeckeRpfError, IncompleteEnumerationError, InputError, SymmetryError,
)
from utils.logger import get_logger, setup_logging
from utils.performance import PerformanceProfiler

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_INCOMPLETE = 2
EXIT_INPUT = 3

VERIFY_CHECKS = ["rpf1", "rpf2", "r1", "r2", "lemma1", "fe", "invmellin"]


@dataclass
class RunConfig:
    """Settings of one run: config file, then environment, then flags"""
    precision_bits: int
    tolerance: float
    sample_count: int
    rng_seed: int
    output: str
    max_depth: Optional[int] = None

    @classmethod
    def from_config(cls) -> "RunConfig":
        return cls(
            precision_bits=get_config('Precision', 'precision_bits'),
            tolerance=get_config('Verification', 'tolerance'),
            sample_count=get_config('Verification', 'sample_count'),
            rng_seed=get_config('Verification', 'rng_seed'),
            output=get_config('Output', 'format'),
        )

    def apply_flags(self, args: argparse.Namespace) -> "RunConfig":
        if args.precision is not None:
            self.precision_bits = args.precision
        if args.tolerance is not None:
            self.tolerance = args.tolerance
        if args.seed is not None:
            self.rng_seed = args.seed
        if args.format is not None:
            self.output = args.format
        if getattr(args, "max_depth", None) is not None:
            self.max_depth = args.max_depth
        self.validate()
        return self

    def validate(self) -> None:
        if self.tolerance <= 0:
            raise InputError(f"tolerance must be positive, got {self.tolerance}")
        if self.precision_bits < 53:
            raise InputError(f"precision must be at least 53 bits, got {self.precision_bits}")
        if self.sample_count < 1:
            raise InputError("sample count must be positive")
        if self.output not in ("json", "csv"):
            raise InputError(f"output format must be json or csv, got {self.output!r}")
        if self.max_depth is not None and self.max_depth < 0:
            raise InputError("max depth must not be negative")

    def context(self, **inputs: Any) -> CheckContext:
        return CheckContext(
            tolerance=self.tolerance,
            sample_count=self.sample_count,
            seed=self.rng_seed,
            precision_bits=self.precision_bits,
            max_depth=self.max_depth,
            **inputs,
        )


class RunArgumentParser(argparse.ArgumentParser):
    """Usage errors become InputError so they share exit code 3"""

    def error(self, message: str) -> None:
        raise InputError(f"usage: {message}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tolerance", type=float, help="residual threshold (default from config)")
    common.add_argument("--precision", type=int, help="working precision in bits")
    common.add_argument("--seed", type=int, help="seed of every sample grid")
    common.add_argument("--out", help="write the report to this file instead of stdout")
    common.add_argument("--format", choices=["json", "csv"], help="report format")
    common.add_argument("--log-level", help="console log level")

    parser = RunArgumentParser(prog="hecke-rpf", description=__doc__.split("\n\n")[1])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=RunArgumentParser)

    group = sub.add_parser("group", parents=[common], help="check the defining relations of G_p")
    group.add_argument("--p", type=int, required=True)

    cycle = sub.add_parser("cycle", parents=[common], help="enumerate the simple numbers of a class")
    cycle.add_argument("--p", type=int, required=True)
    cycle.add_argument("--form", required=True, help='seed form, e.g. "[1,1,-1]" or "[1,[0,1],-1]"')
    cycle.add_argument("--max-depth", type=int)

    verify = sub.add_parser("verify", parents=[common], help="run verification checks on an RPF spec")
    verify.add_argument("spec_file", nargs="?", help="RPF spec JSON")
    verify.add_argument("--spec", dest="spec_flag", help="RPF spec JSON (alternative to the positional)")
    verify.add_argument("--coeffs", help="Fourier coefficient JSON for the functional equation")
    verify.add_argument("--which", default="all", help=f"one of {', '.join(VERIFY_CHECKS)}, all, "
                                                       "or a comma separated list")
    verify.add_argument("--k", type=int, help="override the weight parameter of the spec")
    verify.add_argument("--max-depth", type=int)

    series = sub.add_parser("series", parents=[common], help="write Fourier coefficients of a cusp form")
    series.add_argument("name", choices=sorted(TABLE))
    series.add_argument("--terms", type=int, default=50)
    return parser


def _check_p(p: int) -> int:
    if p < 3:
        raise InputError(f"p must be at least 3, got {p}")
    return p


def _read_json(path: str) -> Dict[str, Any]:
    try:
        return json.loads(Path(path).read_text())
    except OSError as e:
        raise InputError(f"cannot read {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise InputError(f"{path} is not valid JSON: {e}") from e


def parse_form(text: str, p: int) -> QuadraticForm:
    try:
        entries = json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"form {text!r} is not a JSON list: {e}") from e
    if not isinstance(entries, list) or len(entries) != 3:
        raise InputError(f"form needs three entries, got {text!r}")
    try:
        return QuadraticForm.parse(entries, p)
    except DomainError as e:
        raise InputError(e.message) from e


def load_spec(path: str, run: RunConfig, k: Optional[int] = None) -> RpfSpec:
    data = _read_json(path)
    if not isinstance(data, dict):
        raise InputError(f"{path}: spec must be a JSON object")
    if k is not None:
        data["k"] = k
    try:
        return RpfSpec.from_json(data, max_depth=run.max_depth, precision_bits=run.precision_bits)
    except (DomainError, SymmetryError) as e:
        raise InputError(f"{path}: {e.message}") from e


def load_series(path: str) -> FourierSeries:
    data = _read_json(path)
    if not isinstance(data, dict):
        raise InputError(f"{path}: coefficient document must be a JSON object")
    try:
        return FourierSeries.from_json(data)
    except DomainError as e:
        raise InputError(f"{path}: {e.message}") from e


def resolve_checks(which: str) -> List[str]:
    if which == "all":
        return list(VERIFY_CHECKS)
    names = [w.strip() for w in which.split(",") if w.strip()]
    unknown = [n for n in names if n not in VERIFY_CHECKS]
    if unknown or not names:
        raise InputError(f"--which must name checks from {', '.join(VERIFY_CHECKS)} or 'all', got {which!r}")
    return names


def cmd_group(args: argparse.Namespace, run: RunConfig) -> Dict[str, Any]:
    report = get_check_manager().run("group", run.context(p=_check_p(args.p)))
    return _document("group", [report])


def cmd_cycle(args: argparse.Namespace, run: RunConfig) -> Dict[str, Any]:
    form = parse_form(args.form, _check_p(args.p))
    if not (form.is_indefinite() and form.is_simple()):
        raise InputError(f"seed {form} must be simple (A > 0 > C) with positive discriminant")
    if form.has_rational_roots():
        raise InputError(f"seed {form} has roots in Q(lambda); simple numbers must be quadratic irrationals")
    report = get_check_manager().run("cycle", run.context(p=args.p, form=form))
    return _document("cycle", [report])


def cmd_verify(args: argparse.Namespace, run: RunConfig) -> Dict[str, Any]:
    spec_path = args.spec_file or args.spec_flag
    names = resolve_checks(args.which)
    spec = load_spec(spec_path, run, args.k) if spec_path else None
    series = load_series(args.coeffs) if args.coeffs else None
    if spec is None and (series is None or names != ["fe"]):
        raise InputError("verify needs a spec file (or --coeffs with --which fe)")
    context = run.context(spec=spec, series=series, p=spec.p if spec else None)
    reports = get_check_manager().run_many(names, context)
    document = _document("verify", reports)
    if spec is not None:
        document["spec"] = spec.to_json()
    return document


def cmd_series(args: argparse.Namespace, run: RunConfig) -> Dict[str, Any]:
    if args.terms < 1:
        raise InputError("--terms must be positive")
    try:
        return coefficient_document(args.name, args.terms)
    except DomainError as e:
        raise InputError(e.message) from e


COMMANDS = {
    "group": cmd_group,
    "cycle": cmd_cycle,
    "verify": cmd_verify,
    "series": cmd_series,
}


def _document(command: str, reports: Sequence[CheckReport]) -> Dict[str, Any]:
    return {
        "command": command,
        "pass": all(r.passed for r in reports),
        "reports": {r.name: r.to_json() for r in reports},
    }


def render(document: Dict[str, Any], output: str) -> str:
    if output == "csv" and "reports" in document:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["check", "s_re", "s_im", "residual"])
        for name in sorted(document["reports"]):
            report = document["reports"][name]
            for (re, im), residual in zip(report["grid"], report["residuals"]):
                writer.writerow([name, repr(re), repr(im), repr(residual)])
        return buffer.getvalue()
    return json.dumps(document, indent=2, sort_keys=True, default=str) + "\n"


def write_output(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main entry point; returns the process exit code"""
    get_config_manager()
    logger = setup_logging(
        get_config('Logging', 'level'),
        console_output=get_config('Logging', 'console_output'),
        file_output=get_config('Logging', 'file_output'),
        log_file=get_config('Logging', 'log_file'),
    )
    log = get_logger("main")
    try:
        args = build_parser().parse_args(argv)
        if args.log_level:
            logger.configure(args.log_level, console_output=True,
                             file_output=get_config('Logging', 'file_output'),
                             log_file=get_config('Logging', 'log_file'))
        run = RunConfig.from_config().apply_flags(args)
        set_config('Precision', 'precision_bits', run.precision_bits)
        set_config('Verification', 'tolerance', run.tolerance)

        with PerformanceProfiler(f"command {args.command}", log):
            document = COMMANDS[args.command](args, run)
        write_output(render(document, run.output), args.out)
    except InputError as e:
        log.error(e.message)
        return EXIT_INPUT
    except IncompleteEnumerationError as e:
        log.error(f"incomplete enumeration: {e.message}")
        return EXIT_INCOMPLETE
    except DomainError as e:
        log.error(e.message)
        return EXIT_INPUT
    except HeckeRpfError as e:
        log.error(f"{type(e).__name__}: {e.message}")
        return EXIT_FAIL

    if document.get("pass", True):
        return EXIT_PASS
    failed = sorted(name for name, r in document["reports"].items() if not r["pass"])
    log.warning(f"failed checks: {', '.join(failed)}")
    return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
