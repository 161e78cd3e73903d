"""Command-line entry point.

Subcommands: poly, trace, slope, certify, report, transfer, selftest.
Knots are selected by exactly one of --pq P Q, --cf a1,a2,..., or
--double-twist K M.  High-precision numbers are emitted as decimal strings
and JSON is serialized deterministically (sorted keys, fixed formatting), so
identical configurations produce byte-identical output.  Exit status: 0 on
success, 1 on a domain error, 2 on a numerical failure; errors are reported
as machine-readable JSON on stdout.

Expensive symbolic systems are cached on disk under --cache-dir (or
$RILEY_CACHE_DIR), keyed by (p, q) and the code version.
"""

from __future__ import annotations

import argparse
import json
import os
import sys as _sys
from fractions import Fraction
from pathlib import Path
from typing import List, Optional

import mpmath as mp

from . import __version__, certify, continuation, knotspec, laurent, riley
from .continuation import BY_T, BY_U, TraceConfig
from .errors import InputDomainError, NumericalError, RileySlopesError
from .laurent import BivarPoly

CACHE_ENV = "RILEY_CACHE_DIR"


def _parse_int_list(text: str) -> List[int]:
    return [int(x) for x in text.split(",") if x.strip() != ""]


def _select_knot(args) -> knotspec.TwoBridgeKnot:
    chosen = [name for name in ("pq", "cf", "double_twist")
              if getattr(args, name, None) is not None]
    if len(chosen) != 1:
        raise InputDomainError(
            "select the knot with exactly one of --pq, --cf, --double-twist")
    if args.pq is not None:
        p, q = args.pq
        return knotspec.validate_knot(p, q)
    if args.cf is not None:
        cf = knotspec.ContinuedFraction(tuple(_parse_int_list(args.cf)))
        return knotspec.cf_to_pq(cf)
    k, m = args.double_twist
    return knotspec.double_twist_to_pq(k, m)


def _cache_dir(args) -> Optional[Path]:
    raw = args.cache_dir or os.environ.get(CACHE_ENV)
    return Path(raw) if raw else None


def load_system(knot: knotspec.TwoBridgeKnot,
                cache_dir: Optional[Path] = None) -> riley.RileySystem:
    """Riley system with optional disk cache keyed by (p, q, code version)."""
    if cache_dir is None:
        return riley.riley_system(knot)
    cache_dir.mkdir(parents=True, exist_ok=True)
    path = cache_dir / f"riley_{knot.p}_{knot.q}_v{__version__}.json"
    if path.exists():
        data = json.loads(path.read_text(encoding="utf-8"))
        return riley.RileySystem(
            knot=knot,
            A=BivarPoly.from_canonical_text(data["A"]),
            B=BivarPoly.from_canonical_text(data["B"]),
            Dd=BivarPoly.from_canonical_text(data["Dd"]),
            P=BivarPoly.from_canonical_text(data["P"]),
            sigma=int(data["sigma"]),
        )
    sys_ = riley.riley_system(knot)
    payload = {
        "p": knot.p, "q": knot.q, "sigma": sys_.sigma,
        "A": sys_.A.canonical_text(), "B": sys_.B.canonical_text(),
        "Dd": sys_.Dd.canonical_text(), "P": sys_.P.canonical_text(),
    }
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n",
                    encoding="utf-8")
    return sys_


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        _sys.stdout.write(text)


def _check_precision(dps: int) -> int:
    if dps < 30:
        raise InputDomainError(f"precision must be at least 30 digits, got {dps}")
    return dps


def _cmd_poly(args) -> int:
    sys_ = load_system(_select_knot(args), _cache_dir(args))
    _emit(sys_.P.canonical_text() + "\n", args.out)
    return 0


def _cmd_trace(args) -> int:
    dps = _check_precision(args.precision)
    sys_ = load_system(_select_knot(args), _cache_dir(args))
    parameterization = BY_T if args.by == "t" else BY_U
    band = None
    if args.band == "negative":
        band = continuation.negative_branch_band()
    elif args.band == "positive":
        band = continuation.positive_branch_band()
    limit = args.limit if args.limit is not None else \
        ("1e3" if parameterization == BY_T else "1e6")
    cfg = TraceConfig(dps=dps, step=args.step, max_steps=args.max_steps,
                      param_limit=limit, band=band)
    seed = continuation.seed_psi(sys_, dps=dps)
    direction = 1 if args.direction == "up" else -1
    branch = continuation.trace_branch(sys_, seed, cfg, direction=direction,
                                       parameterization=parameterization)
    _emit(continuation.csv_text(branch), args.out)
    return 0


def _cmd_slope(args) -> int:
    dps = _check_precision(args.precision)
    sys_ = load_system(_select_knot(args), _cache_dir(args))
    value = riley.slope_of_point(sys_, args.t, args.u, dps=dps)
    _emit(json.dumps({"slope": mp.nstr(value, dps)}, sort_keys=True) + "\n",
          args.out)
    return 0


def _branches_for(sys_: riley.RileySystem, dps: int):
    return continuation.trace_slope_branches(sys_, dps=dps)


def _cmd_certify(args) -> int:
    dps = _check_precision(args.precision)
    sys_ = load_system(_select_knot(args), _cache_dir(args))
    r = Fraction(args.slope)
    branches = _branches_for(sys_, dps)
    last_error: Optional[Exception] = None
    for br in branches:
        try:
            point = continuation.solve_slope(br, sys_, r)
        except RileySlopesError as exc:
            last_error = exc
            continue
        cert = certify.make_certificate(sys_, point, r, branch=br,
                                        precision_digits=dps)
        _emit(certify.report_to_json(cert), args.out)
        return 0
    raise last_error or InputDomainError(f"no traced branch realizes slope {r}")


def _cmd_report(args) -> int:
    dps = _check_precision(args.precision)
    sys_ = load_system(_select_knot(args), _cache_dir(args))
    samples = [Fraction(x) for x in args.samples.split(",") if x.strip() != ""]
    branches = _branches_for(sys_, dps)
    report = certify.interval_report(sys_, branches, samples,
                                     precision_digits=dps)
    _emit(certify.report_to_json(report), args.out)
    return 0


def _cmd_transfer(args) -> int:
    family = None
    if args.eps is not None:
        eps = tuple(_parse_int_list(args.eps))
        c = tuple(_parse_int_list(args.c)) if args.c else ()
        base = knotspec.ContinuedFraction(tuple(_parse_int_list(args.base)))
        family = knotspec.WangFamilySpec(base=base, c=c, eps=eps)
    lo, hi = (Fraction(x) for x in args.source.split(","))
    cert = certify.transfer_interval(family=family, source=(lo, hi), d=args.d)
    _emit(certify.report_to_json(cert), args.out)
    return 0


def _cmd_selftest(args) -> int:
    from math import gcd
    failures = 0
    count = 0
    for p in range(3, args.max_p + 1, 2):
        for q in range(-p + 2, p, 2):  # odd q in (-p, p)
            if gcd(p, abs(q)) != 1:
                continue
            knot = knotspec.validate_knot(p, q)
            results = riley.verify_exact_identities(knot)
            ok = all(results.values())
            count += 1
            status = "ok" if ok else "FAIL " + \
                ",".join(k for k, v in results.items() if not v)
            print(f"K({p},{q}): {status}")
            if not ok:
                failures += 1
    print(f"selftest: {count - failures}/{count} knots passed")
    if failures:
        raise NumericalError(f"{failures} knots failed the exact-identity suite")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rileyslopes",
        description="Certify left-orderable Dehn-surgery slope intervals on "
                    "2-bridge knots via real curves of the Riley polynomial.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_knot_args(sp):
        sp.add_argument("--pq", nargs=2, type=int, metavar=("P", "Q"))
        sp.add_argument("--cf", type=str, metavar="A1,A2,...")
        sp.add_argument("--double-twist", dest="double_twist", nargs=2,
                        type=int, metavar=("K", "M"))
        sp.add_argument("--cache-dir", type=str, default=None)
        sp.add_argument("--precision", type=int, default=50,
                        help="working precision in decimal digits (>= 30)")
        sp.add_argument("--out", type=str, default=None)

    sp = sub.add_parser("poly", help="write the canonical Riley polynomial")
    add_knot_args(sp)
    sp.set_defaults(func=_cmd_poly)

    sp = sub.add_parser("trace", help="trace a branch of {P = 0} to CSV")
    add_knot_args(sp)
    sp.add_argument("--by", choices=("t", "u"), default="t",
                    help="trace parameter (the other variable is solved)")
    sp.add_argument("--direction", choices=("up", "down"), default="up")
    sp.add_argument("--limit", type=str, default=None,
                    help="parameter bound (default 1e3 by t, 1e6 by u)")
    sp.add_argument("--step", type=str, default="0.05")
    sp.add_argument("--max-steps", type=int, default=2000)
    sp.add_argument("--band", choices=("negative", "positive", "none"),
                    default="none")
    sp.set_defaults(func=_cmd_trace)

    sp = sub.add_parser("slope", help="slope carried by a point (t, u) of {P = 0}")
    add_knot_args(sp)
    sp.add_argument("--t", type=str, required=True)
    sp.add_argument("--u", type=str, required=True)
    sp.set_defaults(func=_cmd_slope)

    sp = sub.add_parser("certify", help="certificate for one rational slope")
    add_knot_args(sp)
    sp.add_argument("--slope", type=str, required=True)
    sp.set_defaults(func=_cmd_certify)

    sp = sub.add_parser("report", help="interval report over sample slopes")
    add_knot_args(sp)
    sp.add_argument("--samples", type=str, required=True,
                    help="comma-separated rationals, e.g. -3.9,-1,1/3,7.9")
    sp.set_defaults(func=_cmd_report)

    sp = sub.add_parser("transfer", help="transfer an interval through a family")
    sp.add_argument("--eps", type=str, default=None,
                    help="comma-separated block signs (+1/-1), length 2n+1")
    sp.add_argument("--c", type=str, default=None,
                    help="comma-separated twist integers, length 2n")
    sp.add_argument("--base", type=str, default="3,1,2")
    sp.add_argument("--d", type=int, default=None,
                    help="explicit longitude scaling (overrides --eps)")
    sp.add_argument("--source", type=str, default="-4,8")
    sp.add_argument("--out", type=str, default=None)
    sp.set_defaults(func=_cmd_transfer)

    sp = sub.add_parser("selftest", help="run the exact-identity suite")
    sp.add_argument("--max-p", type=int, default=13)
    sp.set_defaults(func=_cmd_selftest)

    return parser


# options whose values may start with '-' in ways argparse's negative-number
# heuristic rejects (rational slopes like -1/2, comma lists, -1e6)
_MERGE_VALUE_OPTS = {"--samples", "--slope", "--source", "--c", "--eps",
                     "--limit", "--t", "--u", "--step"}


def _merge_negative_values(argv: List[str]) -> List[str]:
    out: List[str] = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        nxt = argv[i + 1] if i + 1 < len(argv) else None
        if (tok in _MERGE_VALUE_OPTS and nxt is not None and len(nxt) > 1
                and nxt[0] == "-" and (nxt[1].isdigit() or nxt[1] == ".")):
            out.append(f"{tok}={nxt}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    if argv is None:
        argv = _sys.argv[1:]
    args = parser.parse_args(_merge_negative_values(list(argv)))
    try:
        return args.func(args)
    except InputDomainError as exc:
        print(json.dumps({"error": {"code": exc.code, "message": str(exc)}},
                         sort_keys=True))
        return 1
    except NumericalError as exc:
        print(json.dumps({"error": {"code": exc.code, "message": str(exc)}},
                         sort_keys=True))
        return 2
    except (ValueError, ZeroDivisionError) as exc:
        print(json.dumps({"error": {"code": type(exc).__name__,
                                    "message": str(exc)}}, sort_keys=True))
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
