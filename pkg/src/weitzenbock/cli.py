"""Command line entry point.

Subcommands: analyze, levi, verify-identity, quotients, catalog. Exit code 0
when every requested check is conclusive, 2 when some margin is in the
inconclusive band, 1 on errors. The default seed comes from the environment
variable WEITZENBOCK_SEED (0 if unset).
"""

import argparse
import json
import os
import sys

import numpy as np

from . import catalog, fields, geometry, quadrature, report, verify
from .errors import DegenerateGradient, DimensionMismatch, NotStarShaped, RankJump, SpecParseError

SEED_ENV = "WEITZENBOCK_SEED"


def _default_seed():
    try:
        return int(os.environ.get(SEED_ENV, "0"))
    except ValueError:
        raise SystemExit(f"{SEED_ENV} must be an integer") from None


def _emit(text, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        print(text)


def _domains(args, n):
    return [report.domain_for_pair(spec, n) for spec in (args.domain or [])]


def cmd_analyze(args):
    pair = report.resolve_pair(args.pair)
    cfg = dict(seed=args.seed, order=args.order, bump_fields=args.fields, projected_fields=args.fields)
    if args.grid_points:
        cfg["grid_points"] = args.grid_points
    rep = report.run_full_analysis(pair, _domains(args, pair.n), cfg)
    _emit(report.dumps_report(rep, include_timing=not args.no_timing), args.out)
    if args.csv:
        rows = [dict(pair=pair.name, domain=d["domain"]["kind"], order=r.get("order"), field=r.get("field"),
                     lhs=r.get("lhs"), rhs=r.get("rhs"), residual=r.get("residual"))
                for d in rep["domains"] for r in d["identity"]]
        verify.write_csv(rows, args.csv)
    return 0 if rep["conclusive"] else 2


def cmd_levi(args):
    pair = report.resolve_pair(args.pair)
    out = []
    for dom in _domains(args, pair.n) or [report.domain_for_pair("ball", pair.n)]:
        pc = geometry.strong_pseudoconvexity(pair.B, dom, args.resolution)
        cv = geometry.strict_convexity(dom, args.resolution)
        out.append(dict(domain=report.describe_domain(dom), strong_pseudoconvexity=pc, strict_convexity=cv))
    _emit(json.dumps(report._jsonable(out), indent=1, sort_keys=True), args.out)
    return 0


def _suite(pair, dom, args, rng):
    cfg = dict(report.DEFAULT_CONFIG, bump_fields=args.fields, projected_fields=args.fields)
    suite = report._field_suite(pair, dom, cfg, rng)
    if pair.n == 3 and pair.dim_F == 3 and dom.name == "ball":
        suite.append(fields.rotation_field(rng.normal(size=3), pair.B, dom))
    return suite


def _order(args, dom):
    return args.order or quadrature.default_order(dom.n)


def cmd_verify_identity(args):
    pair = report.resolve_pair(args.pair)
    rows = []
    rng = np.random.default_rng(args.seed)
    for dom in _domains(args, pair.n) or [report.domain_for_pair("ball", pair.n)]:
        for fld in _suite(pair, dom, args, rng):
            if not fld.is_compatible:
                continue
            r = verify.weitzenbock_residual(pair, dom, fld, _order(args, dom))
            rows.append(verify.identity_row(pair.name, dom.name, r))
    _write_rows(rows, args.out)
    return 0


def cmd_quotients(args):
    pair = report.resolve_pair(args.pair)
    rows = []
    rng = np.random.default_rng(args.seed)
    for dom in _domains(args, pair.n) or [report.domain_for_pair("ball", pair.n)]:
        suite = [f for f in _suite(pair, dom, args, rng) if f.is_compatible]
        order = _order(args, dom)
        ints = verify.suite_integrals(pair, dom, suite, order)
        mq = verify.morrey_quotient(pair, dom, suite, order, integrals=ints)
        sq = verify.square_function_quotient(pair, dom, suite, order, integrals=ints)
        for fld, m, s in zip(suite, mq["per_field"], sq["per_field"]):
            rows.append(dict(pair=pair.name, domain=dom.name, field=fld.descriptor, order=order,
                             morrey=m, square_function=s))
        rows.append(dict(pair=pair.name, domain=dom.name, field="MAX", order=order,
                         morrey=mq["max_quotient"], square_function=sq["max_quotient"],
                         coercivity=verify.coercivity_quotient(pair, dom, suite, order, integrals=ints)))
    _write_rows(rows, args.out)
    return 0


def _write_rows(rows, out):
    verify.write_csv(rows, out or sys.stdout)


def cmd_catalog(args):
    if not args.pair:
        for name in catalog.names():
            print(name)
        return 0
    entry = catalog.get(args.pair)
    _emit(report.export_pair_spec(entry.pair), args.out)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="weitzenbock", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, pair_required=True):
        p.add_argument("--pair", required=pair_required, help="catalog name like de_rham:3:1, or a pair spec file")
        p.add_argument("--domain", action="append", help="domain spec: ball, ball:R, ellipsoid:a,b,c, "
                       "superellipsoid:a,b,c:p, or a JSON file/text (repeatable)")
        p.add_argument("--order", type=int, help="quadrature order (default 24, or 12 when n > 3)")
        p.add_argument("--seed", type=int, default=_default_seed(), help=f"random seed (default ${SEED_ENV} or 0)")
        p.add_argument("--out", help="output file (default stdout)")

    p = sub.add_parser("analyze", help="full analysis report (JSON)")
    common(p)
    p.add_argument("--fields", type=int, default=4, help="bump and projected fields per domain")
    p.add_argument("--grid-points", type=int, help="sphere grid size for ellipticity scans")
    p.add_argument("--csv", help="also write the identity table as CSV")
    p.add_argument("--no-timing", action="store_true", help="omit wall-clock timings")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("levi", help="strong pseudoconvexity and convexity of domains")
    common(p)
    p.add_argument("--resolution", type=int, default=geometry.DEFAULT_RESOLUTION)
    p.set_defaults(func=cmd_levi)

    p = sub.add_parser("verify-identity", help="Weitzenboeck identity residuals (CSV)")
    common(p)
    p.add_argument("--fields", type=int, default=4)
    p.set_defaults(func=cmd_verify_identity)

    p = sub.add_parser("quotients", help="Morrey, square-function and coercivity quotients (CSV)")
    common(p)
    p.add_argument("--fields", type=int, default=4)
    p.set_defaults(func=cmd_quotients)

    p = sub.add_parser("catalog", help="list catalog pairs, or export one as a pair spec")
    common(p, pair_required=False)
    p.set_defaults(func=cmd_catalog)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SpecParseError, DimensionMismatch, NotStarShaped, DegenerateGradient, RankJump,
            KeyError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
