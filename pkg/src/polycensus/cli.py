"""polycensus command-line interface.

Exit codes: 0 success, 2 configuration error, 3 resource cap exceeded,
4 oracle mismatch or violated inequality, 5 unresolved factorization.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import bounds as bnd
from . import census as cen
from . import lattice as lat
from .numfield import EnumerationTooLarge, FieldError, parse_field_spec
from .polyz import FactorizationError, RootFindingError
from .verify import corpus, verify_landau, verify_mahler

EXIT_OK, EXIT_CONFIG, EXIT_RESOURCE, EXIT_MISMATCH, EXIT_FACTOR = 0, 2, 3, 4, 5


class ConfigError(Exception):
    pass


def _field(spec: str):
    try:
        return parse_field_spec(spec)
    except (FieldError, OSError, KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"bad field {spec!r}: {e}") from e


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _positive(s: str) -> int:
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _first_difference(a: list, b: list):
    sa, sb = set(a), set(b)
    diff = sorted(sa ^ sb)
    return diff[0] if diff else None


def cmd_census(args) -> int:
    K = _field(args.field)
    kw = dict(workers=args.workers, box_limit=args.box_limit, allow_non_monogenic=args.allow_nonmonogenic)
    both = args.pipeline == "both"
    pipelines = ["bruteforce", "constructive"] if both else [args.pipeline]
    reports = []
    members = {}
    for name in pipelines:
        out = cen.run_census(K, args.n, args.height, name, collect_members=both, **kw)
        if both:
            out, members[name] = out
        reports.append(out)
    if both:
        a, b = reports
        if not a.same_counts(b) or members["bruteforce"] != members["constructive"]:
            first = _first_difference(members["bruteforce"], members["constructive"])
            print(f"pipeline mismatch: bruteforce {a.counts()} vs constructive {b.counts()}; "
                  f"first differing coefficient vector (a_0..a_n-1): {first}", file=sys.stderr)
            _emit(_render(reports, args), args.output)
            return EXIT_MISMATCH
    _emit(_render(reports, args), args.output)
    return EXIT_OK


def _render(reports, args) -> str:
    if args.format == "json":
        return cen.reports_to_json(reports, args.timing)
    return cen.reports_to_csv(reports, args.timing)


def cmd_bounds(args) -> int:
    if args.kind == "red":
        if args.D is None and args.field is None:
            raise ConfigError("bounds red needs --D or --field")
        K = _field(args.field) if args.field else None
        D = args.D if args.D is not None else K.degree
        rep = bnd.bound_report(args.n, args.height, D)
        census = cen.census_constructive(K, args.n, args.height, workers=args.workers) if K else None
    else:
        if args.field is None:
            raise ConfigError("bounds irr needs --field")
        K = _field(args.field)
        subs = _subfields(args, K)
        rep = bnd.bound_report(args.n, args.height, K.degree, subs)
        census = cen.census_constructive(K, args.n, args.height, workers=args.workers) if args.compare else None
    if census is not None:
        try:
            bnd.compare(rep, census)
        except bnd.BoundViolation as e:
            print(f"bound violated: {e}", file=sys.stderr)
            _emit(rep.to_json(), args.output)
            return EXIT_MISMATCH
    if args.format == "csv":
        text = "# schema=1\nn,H,D,cor2_value,cor2_zero_height_correction,cor3_value,predicted_class,predicted_exponent\n"
        text += (f"{rep.n},{rep.H},{rep.D},{rep.cor2_value},{rep.cor2_zero_height_correction},"
                 f"{'' if rep.cor3_value is None else repr(rep.cor3_value)},{rep.predicted_class},"
                 f"{rep.predicted_exponent}\n")
    else:
        text = rep.to_json()
    _emit(text, args.output)
    return EXIT_OK


def _subfields(args, K) -> list:
    if args.subfields:
        try:
            raw = json.loads(Path(args.subfields).read_text())
            return [bnd.SubfieldInputs(**r) for r in raw]
        except (OSError, ValueError, TypeError) as e:
            raise ConfigError(f"bad subfield file: {e}") from e
    if args.n != K.degree:
        if K.degree % args.n:
            return []
        raise ConfigError("subfields of degree n < [K:Q] must be supplied with --subfields")
    try:
        return [bnd.subfield_inputs_for(K, args.C1, args.C2, args.volume)]
    except lat.UnsupportedField as e:
        raise ConfigError(str(e)) from e


def cmd_rates(args) -> int:
    K = _field(args.field)
    reports = [cen.run_census(K, args.n, H, args.pipeline, workers=args.workers, box_limit=args.box_limit,
                              allow_non_monogenic=args.allow_nonmonogenic) for H in sorted(set(args.heights))]
    rows = cen.rate_table(reports)
    if args.format == "json":
        text = json.dumps([dict(zip(cen.RATE_COLUMNS, r)) for r in rows], indent=2) + "\n"
    else:
        lines = ["# schema=1", ",".join(cen.RATE_COLUMNS)]
        lines += [",".join(repr(v) if isinstance(v, float) else str(v) for v in r) for r in rows]
        text = "\n".join(lines) + "\n"
    _emit(text, args.output)
    return EXIT_OK


def cmd_invariants(args) -> int:
    K = _field(args.field)
    try:
        U = lat.unit_group(K)
        z = lat.zeta_inputs(K)
    except lat.UnsupportedField as e:
        raise ConfigError(str(e)) from e
    out = {
        "field": K.label,
        "degree": K.degree,
        "signature": list(K.signature),
        "unit_rank": U.rank,
        "roots_of_unity": U.w,
        "fundamental_units": [list(u.coords) for u in U.fundamental_units],
        "regulator": U.regulator,
        "class_number": z.class_number,
        "abs_discriminant": z.abs_discriminant,
        "kappa": lat.kappa(z),
    }
    if K.quadratic_d is not None and U.fundamental_units:
        out["fundamental_unit_str"] = _quad_str(K, U.fundamental_units[0])
    _emit(json.dumps(out, indent=2) + "\n", args.output)
    return EXIT_OK


def _quad_str(K, u) -> str:
    d = K.quadratic_d
    x, y = u.coords
    if d % 4 == 1:
        return f"({2 * x + y} + {y}*sqrt({d}))/2"
    return f"{x} + {y}*sqrt({d})"


def cmd_verify(args) -> int:
    polys = corpus(args.samples, args.seed, args.max_degree, args.max_height)
    if args.which == "landau":
        res = verify_landau(polys)
        for p, m, q in res.violations[:10]:
            print(f"violation: P = {p}, m = {m}, Q = {q}", file=sys.stderr)
        summary = {"check": "landau", "samples": res.checked, "pairs": res.pairs,
                   "violations": len(res.violations), "seed": args.seed}
    else:
        res = verify_mahler(polys)
        for p, M in res.violations[:10]:
            print(f"violation: P = {p}, M(P) = {M!r}", file=sys.stderr)
        summary = {"check": "mahler", "samples": res.checked, "violations": len(res.violations),
                   "seed": args.seed}
    _emit(json.dumps(summary) + "\n", args.output)
    return EXIT_OK if res.ok else EXIT_MISMATCH


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="polycensus", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="cmd", required=True)

    def common(p, field_required=True):
        p.add_argument("--field", required=field_required,
                       help="rational | quad:<d> | powbasis:<config> | <config path>")
        p.add_argument("--workers", type=_positive, default=cen.default_workers(),
                       help="worker processes (default: $POLYCENSUS_WORKERS or 1)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--output", "-o")
        p.add_argument("--box-limit", type=_positive, default=cen.DEFAULT_CENSUS_LIMIT)
        p.add_argument("--allow-nonmonogenic", action="store_true")

    p = sub.add_parser("census", help="count members of the box with a root in K")
    common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--height", "-H", type=int, required=True)
    p.add_argument("--pipeline", choices=("bruteforce", "constructive", "both"), default="constructive")
    p.add_argument("--timing", action="store_true", help="fill elapsed_seconds (breaks byte-identity)")
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("bounds", help="evaluate the explicit reducible/irreducible bounds")
    p.add_argument("kind", choices=("red", "irr"))
    common(p, field_required=False)
    p.set_defaults(format="json")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--height", "-H", type=int, required=True)
    p.add_argument("--D", type=int)
    p.add_argument("--C1", type=float, default=0.0)
    p.add_argument("--C2", type=float, default=0.0)
    p.add_argument("--volume", type=float)
    p.add_argument("--subfields", help="JSON list of subfield inputs")
    p.add_argument("--compare", action="store_true", help="attach a census comparison")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("rates", help="density table over a ladder of heights")
    common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--heights", type=_positive, nargs="+", required=True)
    p.add_argument("--pipeline", choices=("bruteforce", "constructive"), default="constructive")
    p.set_defaults(func=cmd_rates)

    p = sub.add_parser("invariants", help="signature, units, regulator, zeta residue")
    p.add_argument("--field", required=True)
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_invariants)

    p = sub.add_parser("verify", help="randomized height-inequality checks")
    p.add_argument("which", choices=("landau", "mahler"))
    p.add_argument("--samples", type=_positive, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-degree", type=_positive, default=6)
    p.add_argument("--max-height", type=_positive, default=50)
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_CONFIG if e.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ConfigError, cen.NotMonogenicError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (cen.ResourceLimitError, EnumerationTooLarge) as e:
        print(f"resource cap: {e}", file=sys.stderr)
        return EXIT_RESOURCE
    except (FactorizationError, RootFindingError) as e:
        print(f"unresolved factorization: {e}", file=sys.stderr)
        return EXIT_FACTOR
    except (ValueError, FieldError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
