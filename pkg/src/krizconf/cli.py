"""Command-line front end.

Subcommands: ``tables``, ``graded``, ``oyster``, ``verify`` and ``betti``.
Exit codes: 0 success, 1 verification failure, 2 size guard, 3 bad input.
"""

from __future__ import annotations

import argparse
import logging
import sys
from math import comb
from pathlib import Path

from . import checks
from .cohomology import (BigradedTable, Engine, MissingCoefficient, betti_polynomials, cohom_dims,
                         deconvolve_by_C, graded_coefficients, highest_weight_dims,
                         primed_coefficients)
from .linalg import DEFAULT_PRIMES
from .partitions import enumerate_oyster, hook_dim, oyster_listing, oyster_lower_bound, to_frobenius
from .ring import RingError, resolve_ring

EXIT_OK, EXIT_FAIL, EXIT_GUARD, EXIT_INPUT = 0, 1, 2, 3

NMAX_GUARD = 7
RMAX_GUARD = 8
RMAX_WEIGHT_GUARD = 10
KMAX_GUARD = 5

EXTENSIONS = {"csv": "csv", "md": "md", "json": "json"}


class InputError(Exception):
    pass


class GuardError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _primes(text: str):
    try:
        primes = tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad prime list {text!r}") from None
    if len(primes) < 2 or any(p <= 1 << 20 or p >= 1 << 31 for p in primes):
        raise argparse.ArgumentTypeError("need at least two primes in (2^20, 2^31)")
    return primes


def _pair(text: str):
    try:
        p, q = (int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected P,Q, got {text!r}") from None
    return p, q


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--ring", default="elliptic", help="ring file (JSON) or 'elliptic'")
    common.add_argument("--primes", type=_primes, default=DEFAULT_PRIMES,
                        help="comma-separated primes for rank certificates")
    common.add_argument("--cache", type=Path, help="JSON result cache")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for rank jobs")
    common.add_argument("--force", "--stretch", action="store_true", help="lift the size guards")
    common.add_argument("--weight", type=int, help="restrict to one torus weight")
    common.add_argument("--format", choices=sorted(EXTENSIONS), default="csv")
    common.add_argument("--out", type=Path, help="directory for table files (default: stdout)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="krizconf", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    t = sub.add_parser("tables", parents=[common], help="cohomology tables of conf(C, n) and conf(C, n)/C")
    t.add_argument("nmax", type=int)
    t.add_argument("--full", action="store_true", help="also emit the tables of conf(C, n)")

    g = sub.add_parser("graded", parents=[common], help="coefficients a_r from the quotient complexes")
    g.add_argument("rmax", type=int)
    g.add_argument("--rmin", type=int, default=3)
    g.add_argument("--piece", type=_pair, help="only the bidegree P,Q (raw coefficient)")
    g.add_argument("--raw", action="store_true", help="emit raw tables instead of /C ones")

    o = sub.add_parser("oyster", parents=[common], help="oyster partitions and lower bounds")
    o.add_argument("p", type=int, nargs="?")
    o.add_argument("q", type=int, nargs="?")
    o.add_argument("--kaN", type=int, nargs=3, metavar=("K", "A", "N"),
                   help="list the (K, A)-oysters of N instead")

    v = sub.add_parser("verify", parents=[common], help="run the invariant suites")
    v.add_argument("--level", choices=sorted(checks.LEVELS), default="quick")

    b = sub.add_parser("betti", parents=[common], help="Betti polynomials b_k(n)")
    b.add_argument("kmax", type=int)
    b.add_argument("--at", type=lambda s: [int(x) for x in s.split(",")], default=[],
                   help="evaluate at these n")
    b.add_argument("--no-vanishing", action="store_true",
                   help="do not fill coefficients beyond r = 8 from the vanishing results")
    return parser


def _engine(args) -> Engine:
    try:
        ring = resolve_ring(args.ring)
    except (RingError, OSError, ValueError) as exc:
        raise InputError(f"cannot load ring: {exc}") from None
    return Engine(ring, args.primes, args.cache, args.jobs)


def _emit(args, name: str, table: BigradedTable, out):
    text = table.export(args.format)
    if args.out:
        args.out.mkdir(parents=True, exist_ok=True)
        (args.out / f"{name}.{EXTENSIONS[args.format]}").write_text(text)
    else:
        print(f"# {name}", file=out)
        out.write(text)


def cmd_tables(args, out) -> int:
    if args.nmax < 0:
        raise InputError("nmax must be nonnegative")
    if args.nmax > NMAX_GUARD and not args.force:
        raise GuardError(f"nmax = {args.nmax} exceeds the guard {NMAX_GUARD}; pass --force")
    eng = _engine(args)
    for n in range(1, args.nmax + 1):
        full = cohom_dims(eng.ring, n, eng)
        if args.full:
            _emit(args, f"full_n{n}", full, out)
        if eng.ring.ring_id == "elliptic" and n >= 2:
            _emit(args, f"table_{n - 1:02d}", deconvolve_by_C(full), out)
    return EXIT_OK


def cmd_graded(args, out) -> int:
    guard = RMAX_WEIGHT_GUARD if args.weight is not None else RMAX_GUARD
    if args.rmax > guard and not args.force:
        raise GuardError(f"rmax = {args.rmax} exceeds the guard {guard}; pass --force")
    eng = _engine(args)
    if args.piece is not None:
        p, q = args.piece
        for r in range(args.rmin, args.rmax + 1):
            v = eng.cohomology("graded", r, p, q, args.weight)
            tag = f" w={args.weight}" if args.weight is not None else ""
            print(f"a_{r}^{{{p},{q}}}{tag} = {v}", file=out)
        return EXIT_OK
    if args.weight is not None:
        for r in range(args.rmin, args.rmax + 1):
            _emit(args, f"graded_r{r}_w{args.weight}", eng.table("graded", r, args.weight), out)
        return EXIT_OK
    for r in range(args.rmin, args.rmax + 1):
        if args.raw:
            _emit(args, f"graded_r{r}", graded_coefficients(eng.ring, r, eng), out)
        else:
            _emit(args, f"table_{r + 4:02d}", primed_coefficients(eng.ring, r, eng), out)
    if args.rmax >= 8:
        a = eng.cohomology("graded", 8, 2, 3)
        h = 176 * comb(8, 6) + 259 * comb(8, 7) + a
        print(f"a_8^{{2,3}} = {a}; dim H^{{2,3}}(conf(C,8)/C) = {h}", file=out)
    return EXIT_OK


def cmd_oyster(args, out) -> int:
    if args.kaN:
        k, a, N = args.kaN
        for la in enumerate_oyster(k, a, N):
            print(f"{la}  {to_frobenius(la)}  dim {hook_dim(la)}", file=out)
        return EXIT_OK
    if args.p is None or args.q is None:
        raise InputError("give P Q or --kaN K A N")
    p, q = args.p, args.q
    if p < 0 or q < 0:
        raise InputError("p and q must be nonnegative")
    for row in oyster_listing(p, q):
        print(f"(k,a)=({row['k']},{row['a']})  {row['partition']}  {row['frobenius']}  "
              f"dim {row['dim']} x {row['sl2_dim']}", file=out)
    bound, poly = oyster_lower_bound(p, q)
    print(f"bound {bound}: {poly}", file=out)
    return EXIT_OK


def cmd_verify(args, out) -> int:
    eng = _engine(args)
    results = checks.run_suite(args.level, eng, echo=lambda s: print(s, file=out, flush=True))
    failed = [r for r in results if not r.ok]
    print(f"{len(results) - len(failed)}/{len(results)} suites passed", file=out)
    return EXIT_FAIL if failed else EXIT_OK


def cmd_betti(args, out) -> int:
    if args.kmax < 0:
        raise InputError("kmax must be nonnegative")
    if args.kmax > KMAX_GUARD and not args.force:
        raise GuardError(f"kmax = {args.kmax} exceeds the guard {KMAX_GUARD}; pass --force")
    eng = _engine(args)
    try:
        polys = betti_polynomials(args.kmax, eng.ring, use_vanishing=not args.no_vanishing, engine=eng)
    except MissingCoefficient as exc:
        raise InputError(str(exc)) from None
    for k, poly in polys.items():
        values = "".join(f"  b_{k}({n}) = {poly(n)}" for n in args.at)
        print(f"b_{k} = {poly}{values}", file=out)
    return EXIT_OK


COMMANDS = {"tables": cmd_tables, "graded": cmd_graded, "oyster": cmd_oyster,
            "verify": cmd_verify, "betti": cmd_betti}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args, out)
    except GuardError as exc:
        print(f"krizconf: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except InputError as exc:
        print(f"krizconf: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
