"""Command-line front end.

Exit codes: 0 success, 1 a verification check failed, 2 the manifold data
violate a structural invariant, 3 the input could not be parsed.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path

from .algebra import Arithmetic, format_scalar
from .family import FamilyParams, family_spec
from .levi_civita import classify, square_norm_report
from .lie import SpecError, ValidationError, spec_from_dict
from .report import Report, dumps
from .verify import SUITES, family_battery, failing_checks, run_suite, summarize, verify_spec

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INVALID = 2
EXIT_PARSE = 3


class InputError(Exception):
    pass


def _mode() -> Arithmetic:
    try:
        return Arithmetic.from_env()
    except ValueError as exc:
        raise InputError(f"NORDEN_MODE: {exc}") from exc


def _digest(data: bytes) -> str:
    return "sha256:" + hashlib.sha256(data).hexdigest()


def _load(path: str, arith: Arithmetic):
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from exc
    try:
        doc = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise InputError(f"{path}: invalid JSON: {exc}") from exc
    try:
        spec = spec_from_dict(doc, arith.mode, arith.tol)
    except SpecError as exc:
        raise InputError(f"{path}: {exc}") from exc
    return spec, _digest(raw)


def _emit(doc: str, path: str | None) -> None:
    if path:
        Path(path).write_text(doc, encoding="utf-8")
    else:
        sys.stdout.write(doc)


def _invalid(exc: ValidationError, digest: str | None) -> int:
    doc = {"error": "validation", "input_digest": digest, "validation": exc.report.to_dict()}
    sys.stdout.write(dumps(doc))
    for c in exc.report.checks:
        if not c.passed:
            where = "" if c.witness is None else f" at {tuple(c.witness)}"
            print(f"invalid: {c.name} violated{where}", file=sys.stderr)
    return EXIT_INVALID


def cmd_classify(args) -> int:
    arith = _mode()
    spec, digest = _load(args.input, arith)
    try:
        spec.require_valid()
    except ValidationError as exc:
        return _invalid(exc, digest)
    verdict = classify(spec)
    norm = square_norm_report(spec)
    isotropic = arith.is_zero(norm.value)
    if args.json:
        rep = Report("classify")
        rep.data.update({
            "input_digest": digest,
            "mode": arith.mode,
            "class": verdict.label,
            "square_norm": norm.value,
            "isotropic_kahler": isotropic,
        })
        sys.stdout.write(rep.dumps())
    else:
        print(f"{verdict.label}, ‖∇J‖ = {format_scalar(norm.value)}, isotropic: {str(isotropic).lower()}")
    return EXIT_OK


def cmd_family(args) -> int:
    arith = _mode()
    try:
        p = FamilyParams.parse(args.lambdas)
    except ValueError as exc:
        raise InputError(f"--lambda: {exc}") from exc
    rep = family_battery(p, arith)
    rep.data.update(input_digest=_digest(str(p).encode()), mode=arith.mode, **{"lambda": list(p.values)})
    summarize(rep)
    doc = rep.dumps()
    if args.report:
        _emit(doc, args.report)
        props = rep.sections[0]
        kahler = props.check("kahler_iff_on_locus").detail
        spec = family_spec(p, arith)
        print(f"λ = ({', '.join(format_scalar(v) for v in p.values)}): {classify(spec).label}, "
              f"‖∇J‖ = {format_scalar(props.data['square_norm'])}, "
              f"R' Kähler: {str(kahler['is_kahler']).lower()}, "
              f"on λ1²+λ2²=λ3²+λ4²: {str(kahler['on_locus']).lower()}")
    else:
        _emit(doc, None)
    return EXIT_OK


def cmd_verify(args) -> int:
    arith = _mode()
    started = time.perf_counter()
    if args.input:
        spec, digest = _load(args.input, arith)
        if not spec.report.ok:
            return _invalid(ValidationError(spec.report), digest)
        rep = verify_spec(spec, Path(args.input).stem)
        rep.data["input_digest"] = digest
    else:
        if args.samples < 1:
            raise InputError("--samples must be positive")
        rep = run_suite(args.suite, args.samples, args.seed, max(1, args.jobs), arith)
    _emit(rep.dumps(), args.report)
    elapsed = time.perf_counter() - started
    counts = rep.data["counts"]
    summary = ", ".join(f"{k} {v}" for k, v in counts.items())
    print(f"{rep.title}: {summary} ({elapsed:.1f} s)", file=sys.stderr)
    if rep.ok:
        return EXIT_OK
    print(f"FAIL: {rep.data['first_failure']}", file=sys.stderr)
    if args.verbose:
        for path in failing_checks(rep):
            print(f"  fail: {path}", file=sys.stderr)
    return EXIT_FAILED


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # usage errors are input errors, distinct from invalid manifold data
        self.print_usage(sys.stderr)
        self.exit(EXIT_PARSE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="norden",
        description="Left-invariant Norden structures on Lie groups: classification, "
                    "the skew-torsion natural connection, curvature identities.",
        epilog="Set NORDEN_MODE=float for float64 arithmetic (default: exact rationals).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="classify a manifold given as JSON")
    p.add_argument("input", help="JSON manifold description")
    p.add_argument("--json", action="store_true", help="emit a JSON report instead of one line")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("family", help="full report for one member of the four-parameter family")
    p.add_argument("--lambda", dest="lambdas", required=True, metavar="a,b,c,d",
                   help="four scalars, e.g. 1,0,-3/2,0.5")
    p.add_argument("--report", metavar="PATH", help="write the JSON report here and print a summary")
    p.set_defaults(func=cmd_family)

    p = sub.add_parser("verify", help="run a verification suite, or the battery for one JSON manifold")
    p.add_argument("input", nargs="?", help="JSON manifold description (overrides --suite)")
    p.add_argument("--suite", choices=SUITES, default="paper")
    p.add_argument("--samples", type=int, default=100, help="parameter samples for the random suite")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.add_argument("--report", metavar="PATH", help="write the JSON report here instead of stdout")
    p.add_argument("-v", "--verbose", action="store_true", help="list every failing check")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
