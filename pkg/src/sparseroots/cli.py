"""Command-line driver: ``sparseroots {isolate,refine,verify,bench}``."""

from __future__ import annotations

import argparse
import json
import random
import sys
from typing import Optional, Sequence

from .dyadic import Dyadic
from .errors import (
    BoundOverflowError,
    ContractError,
    DensifyError,
    InvariantViolation,
    ParseError,
    ZeroPolynomialError,
)
from .isolate import IsolatedRoot, isolate_all, isolate_positive
from .numeric import certified_sign, chain_bound
from .poly import SparsePolynomial, clear_denominators, parse, parse_rational, strip_power
from .refine import RefineState, refine_root
from .stats import Stats

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARSE = 2
EXIT_INVARIANT = 3
EXIT_VERIFY = 4

MAX_WIDTH_BITS = 2**62 - 1


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1 or value > MAX_WIDTH_BITS:
        raise argparse.ArgumentTypeError(f"must be in [1, 2^62-1]: {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sparseroots",
                     description="Certified real-root isolation for sparse integer polynomials.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add_input(p):
        src = p.add_mutually_exclusive_group(required=True)
        src.add_argument("--expr", help='polynomial such as "x^50 - 4x^48 + 3"')
        src.add_argument("--file", help="file holding an expression or a JSON term list")

    def add_output(p):
        p.add_argument("--width-bits", type=_positive_int, default=None,
                       help="refine simple roots to width below 2^-W (default: chain bound)")
        p.add_argument("--json", action="store_true", help="emit JSON")
        p.add_argument("--stats", action="store_true", help="print work counters")

    p = sub.add_parser("isolate", help="isolate all real roots")
    add_input(p)
    add_output(p)
    p.add_argument("--positive-only", action="store_true", help="only roots in (0, inf)")
    p.add_argument("--strict", action="store_true",
                   help="refine every chain root to the separation bound before sign tests")

    p = sub.add_parser("refine", help="refine an interval with a sign change")
    add_input(p)
    add_output(p)
    p.add_argument("--interval", required=True, help='"lo,hi" as dyadics, e.g. "1*2^0,1*2^1"')

    for name, help_text in (("verify", "check a random corpus against the dense oracle"),
                            ("bench", "work counters over a degree grid")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--count", type=_positive_int, default=100 if name == "verify" else 3)
        p.add_argument("--width-bits", type=_positive_int, default=64)
        p.add_argument("--json", action="store_true")
        p.add_argument("--stats", action="store_true")
    return parser


def read_polynomial(expr: Optional[str], path: Optional[str]) -> SparsePolynomial:
    text = expr
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    if text.lstrip().startswith("{"):
        return SparsePolynomial.from_json(text)
    if "/" in text:
        # same roots after multiplying through by the denominators
        return clear_denominators(parse_rational(text.strip()))
    return parse(text.strip())


def _render_roots(roots: list[IsolatedRoot], stats: Stats, as_json: bool,
                  show_stats: bool) -> str:
    if as_json:
        payload = {"roots": [r.to_json() for r in roots], "stats": stats.to_json()}
        return json.dumps(payload, sort_keys=False)
    lines = []
    for r in roots:
        approx = (r.lo + r.hi).half().decimal(20)
        where = f"{r.lo}" if r.exact else f"({r.lo}, {r.hi})"
        lines.append(f"{where}  multiplicity={r.multiplicity}  approx={approx}")
    if not roots:
        lines.append("no real roots")
    if show_stats:
        lines.append(_stats_line(stats))
    return "\n".join(lines)


def _stats_line(stats: Stats) -> str:
    return (f"evaluations={stats.evaluations} iterations={stats.refinement_iterations}"
            f" max_precision_bits={stats.max_precision_bits}")


def _cmd_isolate(args) -> int:
    p = read_polynomial(args.expr, args.file)
    stats = Stats()
    if args.positive_only:
        q, _ = strip_power(p)
        roots = isolate_positive(q, stats, args.width_bits, args.strict)
    else:
        roots = isolate_all(p, stats, args.width_bits, args.strict)
    print(_render_roots(roots, stats, args.json, args.stats))
    return EXIT_OK


def _parse_interval(text: str) -> tuple[Dyadic, Dyadic]:
    parts = text.split(",")
    if len(parts) != 2:
        raise UsageError('--interval expects "lo,hi"')
    try:
        lo, hi = Dyadic.parse(parts[0]), Dyadic.parse(parts[1])
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if not lo < hi:
        raise UsageError("--interval needs lo < hi")
    return lo, hi


def _cmd_refine(args) -> int:
    p = read_polynomial(args.expr, args.file)
    lo, hi = _parse_interval(args.interval)
    stats = Stats()
    sa, sb = certified_sign(p, lo, stats=stats), certified_sign(p, hi, stats=stats)
    if sa == 0 or sb == 0:
        # an endpoint is itself a root; report it exactly
        x = lo if sa == 0 else hi
        roots = [IsolatedRoot(x, x, 1, 1)]
    else:
        if sa == sb:
            raise UsageError("the polynomial must change sign on the interval")
        width = args.width_bits
        if width is None:
            width = chain_bound(p.degree, p.coeff_bits(), p.k).L
        s = refine_root(p, RefineState(lo, hi, 4, sa, sb), width, stats)
        roots = [IsolatedRoot(s.a, s.b, 1, 1)]
    print(_render_roots(roots, stats, args.json, args.stats))
    return EXIT_OK


def _cmd_verify(args) -> int:
    from .corpus import corpus
    from .oracle import verify_isolation

    stats = Stats()
    failures = []
    count = 0
    for i, p in enumerate(corpus(args.seed, args.count)):
        roots = isolate_all(p, stats, args.width_bits)
        report = verify_isolation(p, roots)
        count += 1
        if not report.passed:
            failures.append({"index": i, "polynomial": str(p),
                             "diagnostics": report.diagnostics})
    if args.json:
        out = {"instances": count, "failures": failures}
        if args.stats:
            out["stats"] = stats.to_json()
        print(json.dumps(out))
    else:
        for f in failures:
            print(f"FAIL #{f['index']}: {f['polynomial']}: {'; '.join(f['diagnostics'])}")
        print(f"{count - len(failures)}/{count} instances verified")
        if args.stats:
            print(_stats_line(stats))
    return EXIT_VERIFY if failures else EXIT_OK


BENCH_DEGREES = (2**6, 2**10, 2**14, 2**20)


def _cmd_bench(args) -> int:
    from .corpus import random_knomial

    rng = random.Random(args.seed)
    rows = []
    for n in BENCH_DEGREES:
        stats = Stats()
        roots = 0
        for _ in range(args.count):
            p = random_knomial(rng, 4, n, 8, degree=n)
            roots += len(isolate_all(p, stats, args.width_bits))
        rows.append({"degree": n, "instances": args.count, "roots": roots,
                     **stats.to_json()})
    if args.json:
        print(json.dumps({"rows": rows}))
    else:
        header = ("degree", "instances", "roots", "evaluations", "iterations",
                  "max_precision_bits")
        print("  ".join(f"{h:>18}" for h in header))
        for row in rows:
            print("  ".join(f"{row[h]:>18}" for h in header))
    return EXIT_OK


_COMMANDS = {"isolate": _cmd_isolate, "refine": _cmd_refine,
             "verify": _cmd_verify, "bench": _cmd_bench}


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except InvariantViolation as exc:
        print(f"internal invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (UsageError, ContractError, ZeroPolynomialError, BoundOverflowError,
            DensifyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
