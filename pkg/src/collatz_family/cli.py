"""Command-line front end: ``traj``, ``verify``, ``matrix``, ``coeffs``, ``reach``.

Exit codes: 0 when every check passes, 1 for a counterexample or an
exhausted budget, 2 for usage errors.
"""
from __future__ import annotations

import argparse
import re
import sys

from . import export
from .analysis import closed_forms, format_fraction, parity_vector
from .conjugacy import (
    IDENTITY_ALIASES,
    Identity,
    describe_range,
    resolve_identity,
    verify_average,
    verify_bound_transfer,
    verify_coeff_pairs,
    verify_coeff_relation,
    verify_conjugacy,
    verify_lower_bound,
    verify_offset_constancy,
    verify_parity_duality,
    verify_parity_opposition,
    verify_partial_means,
    verify_reach,
)
from .dynamics import DEFAULT_MAX_STEPS, CollatzT, DomainError, FamilyF, iterate, run_until
from .matrix import Mode, build_matrix, parse_substitution, reorder, substitute, verify_chromatic_equivalence

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def parse_range(text: str) -> list[int]:
    """``a..b`` (empty if b < a), a single integer, or a comma list."""
    text = text.strip()
    m = re.fullmatch(r"(-?\d+)\.\.(-?\d+)", text)
    if m:
        lo, hi = int(m.group(1)), int(m.group(2))
        return list(range(lo, hi + 1))
    try:
        return [int(part) for part in text.split(",")]
    except ValueError:
        raise UsageError(f"bad range {text!r}; expected a..b, an integer or a comma list") from None


def parse_pair(text: str) -> tuple[int, int]:
    try:
        n, m = (int(x) for x in text.split(","))
    except ValueError:
        raise UsageError(f"bad pair {text!r}; expected n,m") from None
    return n, m


def _kind(args) -> CollatzT | FamilyF:
    if args.map == "T":
        return CollatzT()
    if args.n is None:
        raise UsageError("--map F needs --n")
    return FamilyF.of(args.n)


def _emit(text: str, output: str | None) -> None:
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# --- traj ----------------------------------------------------------------------


def cmd_traj(args) -> int:
    kind = _kind(args)
    if args.until_cycle:
        traj = run_until(kind, args.start, args.max_steps)
    else:
        if args.k < 0:
            raise UsageError("--k must be >= 0")
        traj = iterate(kind, args.start, args.k)
    pv = parity_vector(kind, args.start, traj.steps)
    count_name = "beta" if isinstance(kind, CollatzT) else "alpha"
    if args.format == "json":
        data = export.trajectory_to_dict(traj)
        data["parity"] = list(pv.bits)
        data[count_name] = pv.count
        text = export.dumps(data) + "\n"
    elif args.format == "csv":
        text = ",".join(map(str, traj.terms)) + "\n"
    else:
        lines = [" ".join(map(str, traj.terms)), f"stop: {traj.stop.value} after {traj.steps} steps"]
        if traj.cycle is not None:
            lines.append("cycle: " + " ".join(map(str, traj.cycle)))
        lines.append("parity: " + " ".join(map(str, pv.bits)))
        lines.append(f"{count_name}: {pv.count}")
        text = "\n".join(lines) + "\n"
    _emit(text, args.output)
    return EXIT_FAIL if traj.stop.value == "budget_exhausted" else EXIT_OK


# --- verify --------------------------------------------------------------------


def cmd_verify(args) -> int:
    try:
        identity = resolve_identity(args.identity)
    except ValueError:
        names = sorted([i.value for i in Identity] + list(IDENTITY_ALIASES))
        raise UsageError(f"unknown identity {args.identity!r}; choose from {', '.join(names)}") from None
    Ns = parse_range(args.N)
    ns = parse_range(args.n)
    pairs = [parse_pair(p) for p in args.pair] if args.pair else [(3, -2)]
    k, w = args.k, args.workers
    if k < 0:
        raise UsageError("--k must be >= 0")
    if identity not in (Identity.REACH, Identity.LOWER_BOUND, Identity.CHROMA) and any(N < 1 for N in Ns):
        raise UsageError("--N values must be positive")

    if identity is Identity.CONJUGACY:
        report = verify_conjugacy(Ns, ns, k, workers=w)
    elif identity is Identity.AVERAGE:
        report = verify_average(Ns, ns, k, workers=w)
    elif identity is Identity.PARTIAL_MEAN:
        report = verify_partial_means(Ns, k, args.n_max, workers=w)
    elif identity is Identity.OFFSET:
        report = verify_offset_constancy(Ns, pairs, k, workers=w)
    elif identity is Identity.BOUND_TRANSFER:
        report = verify_bound_transfer(Ns, pairs, k, workers=w)
    elif identity is Identity.PARITY:
        report = verify_parity_opposition(Ns, ns, k, workers=w)
    elif identity is Identity.PARITY_COUNT:
        report = verify_parity_duality(Ns, ns, k, workers=w)
    elif identity is Identity.COEFF:
        report = verify_coeff_relation(Ns, ns, k, pairs=args.pair and pairs, workers=w)
    elif identity is Identity.COEFF_PAIR:
        report = verify_coeff_pairs(Ns, pairs, k, workers=w)
    elif identity is Identity.LOWER_BOUND:
        report = verify_lower_bound(ns, args.offset, k, workers=w)
    elif identity is Identity.REACH:
        if args.budget < 1:
            raise UsageError("--budget must be >= 1")
        report = _reach_over(ns, args.offset, args.budget, False, w)
    else:
        if args.M < 3 or k < 1:
            raise UsageError("chroma needs --M >= 3 and --k >= 1")
        report = verify_chromatic_equivalence(args.M, k, ns)

    if args.format == "json":
        text = export.report_to_json(report) + "\n"
    else:
        text = export.report_to_text(report) + "\n"
    _emit(text, args.output)
    return EXIT_OK if report.passed else EXIT_FAIL


def _reach_over(ns, offset, budget, per_start, workers):
    reports = [verify_reach(n, offset, budget, per_start=per_start, workers=workers) for n in ns]
    if not reports:
        return verify_reach(0, -1, budget)
    if len(reports) == 1:
        return reports[0]
    merged = reports[0]
    for r in reports[1:]:
        merged = merged.merge(r)
    merged.params["n"] = describe_range(ns)
    merged.observed["anchor"] = {str(n): 2 * n + 2 for n in ns}
    return merged


# --- matrix --------------------------------------------------------------------


def cmd_matrix(args) -> int:
    if args.M < 3 or args.k < 1:
        raise UsageError("matrix needs --M >= 3 and --k >= 1")
    if args.subst is not None:
        if args.n is not None:
            raise UsageError("--subst and --n are mutually exclusive")
        try:
            value = parse_substitution(args.subst)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        m = substitute(build_matrix(Mode.SYMBOLIC, args.M, args.k), value)
    elif args.n is not None:
        if args.symbolic:
            raise UsageError("--symbolic and --n are mutually exclusive")
        m = build_matrix(Mode.CONCRETE, args.M, args.k, args.n)
    else:
        m = build_matrix(Mode.SYMBOLIC, args.M, args.k)
    m = reorder(m, descending=not args.ascending)
    _emit(export.render_matrix(m, args.format), args.output)
    return EXIT_OK


# --- coeffs --------------------------------------------------------------------


def coeff_rows(kind, start: int, k: int) -> list[dict]:
    forms = closed_forms(kind, start, k)
    terms = kind.orbit(start, k)
    return [
        {
            "k": f.k,
            "count": f.count,
            "lead": format_fraction(f.lead),
            "adjustment": format_fraction(f.adjustment),
            "term": terms[f.k],
        }
        for f in forms
    ]


def cmd_coeffs(args) -> int:
    if args.k < 0:
        raise UsageError("--k must be >= 0")
    kind = _kind(args)
    rows = coeff_rows(kind, args.start, args.k)
    count_name = "beta" if isinstance(kind, CollatzT) else "alpha"
    adj_name = "r" if isinstance(kind, CollatzT) else "phi"
    if args.format == "json":
        payload = {
            **export.kind_to_dict(kind),
            "start": args.start,
            "rows": [
                {"k": r["k"], count_name: r["count"], "lead": r["lead"], adj_name: r["adjustment"], "term": str(r["term"])}
                for r in rows
            ],
        }
        text = export.dumps(payload) + "\n"
    elif args.format == "csv":
        lines = [f"k,{count_name},lead,{adj_name},term"]
        lines += [f"{r['k']},{r['count']},{r['lead']},{r['adjustment']},{r['term']}" for r in rows]
        text = "\n".join(lines) + "\n"
    else:
        header = f"{'k':>4} {count_name:>6} {'3^count/2^k':>24} {adj_name:>24} {'term':>12}"
        lines = [header]
        lines += [f"{r['k']:>4} {r['count']:>6} {r['lead']:>24} {r['adjustment']:>24} {r['term']:>12}" for r in rows]
        text = "\n".join(lines) + "\n"
    _emit(text, args.output)
    return EXIT_OK


# --- reach ---------------------------------------------------------------------


def cmd_reach(args) -> int:
    if args.budget < 1:
        raise UsageError("--budget must be >= 1")
    if args.upto < 0:
        raise UsageError("--upto must be >= 0")
    report = verify_reach(args.n, args.upto, args.budget, per_start=args.per_start, workers=args.workers)
    if args.format == "json":
        text = export.report_to_json(report) + "\n"
    else:
        anchor = report.observed["anchor"]
        reached = report.checked - report.failure_count
        lines = [
            f"n={args.n} anchor={anchor} starts={report.params['P']} budget={args.budget}",
            f"reached {reached}/{report.checked}; max steps {report.observed['max_steps']}",
        ]
        if report.passed:
            lines.append(f"all starts reach {anchor}")
        for failure in report.failures:
            lines.append("not reached: " + " ".join(map(str, failure)))
        lines.append("histogram (steps: starts):")
        lines += [f"  {s}: {c}" for s, c in report.observed["histogram"].items()]
        if args.per_start:
            lines.append("steps per start:")
            lines += [f"  {p}: {s}" for p, s in report.observed["steps"].items()]
        text = "\n".join(lines) + "\n"
    _emit(text, args.output)
    return EXIT_OK if report.passed else EXIT_FAIL


# --- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="collatz-family", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, formats=("text", "json", "csv")):
        p.add_argument("--format", choices=formats, default="text")
        p.add_argument("--output", "-o", help="write to this file instead of stdout")

    p = sub.add_parser("traj", help="print an orbit of T or F_n")
    p.add_argument("--map", choices=("T", "F"), default="T")
    p.add_argument("--n", type=int)
    p.add_argument("--start", type=int, required=True)
    p.add_argument("--k", type=int, default=10, help="number of steps (ignored with --until-cycle)")
    p.add_argument("--until-cycle", "--until", action="store_true", help="stop at the anchor or a cycle")
    p.add_argument("--max-steps", type=int, default=DEFAULT_MAX_STEPS)
    common(p)
    p.set_defaults(func=cmd_traj)

    p = sub.add_parser("verify", help="sweep a grid and check one identity")
    p.add_argument("--identity", required=True)
    p.add_argument("--N", default="1..100", help="range of N, e.g. 1..1000")
    p.add_argument("--n", default="-5..5", help="range of n, e.g. -20..20")
    p.add_argument("--pair", action="append", help="n,m pair (repeatable)")
    p.add_argument("--k", type=int, default=16, help="largest k checked")
    p.add_argument("--n-max", type=int, default=10, help="largest truncation for partial-mean")
    p.add_argument("--offset", type=int, default=1000, help="largest P - (2n+2) for reach / lower-bound")
    p.add_argument("--budget", type=int, default=DEFAULT_MAX_STEPS)
    p.add_argument("--M", type=int, default=16, help="top offset for chroma")
    p.add_argument("--workers", type=int)
    common(p, ("text", "json"))
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("matrix", help="build and export a generalized Collatz matrix")
    p.add_argument("--symbolic", action="store_true")
    p.add_argument("--n", type=int, help="build the concrete F_n matrix")
    p.add_argument("--subst", help="substitute an integer or -1/2 into the symbolic matrix")
    p.add_argument("--M", type=int, default=16)
    p.add_argument("--k", type=int, default=6)
    p.add_argument("--ascending", action="store_true", help="smallest start on top")
    common(p, ("text", "csv", "json", "html"))
    p.set_defaults(func=cmd_matrix)

    p = sub.add_parser("coeffs", help="closed-form coefficients for every k")
    p.add_argument("--map", choices=("T", "F"), default="T")
    p.add_argument("--n", type=int)
    p.add_argument("--start", type=int, required=True)
    p.add_argument("--k", type=int, default=10)
    common(p)
    p.set_defaults(func=cmd_coeffs)

    p = sub.add_parser("reach", help="check that every start in D(n) reaches 2n+2")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--upto", type=int, default=1000, help="largest P - (2n+2)")
    p.add_argument("--budget", "--max-steps", type=int, default=DEFAULT_MAX_STEPS)
    p.add_argument("--per-start", action="store_true")
    p.add_argument("--workers", type=int)
    common(p, ("text", "json"))
    p.set_defaults(func=cmd_reach)
    return parser


_NEGATIVE_VALUE = re.compile(r"^-\d")


def _glue_negative_values(argv: list[str]) -> list[str]:
    # argparse reads "-1/2" or "-20..20" as an option; bind them to the flag.
    out: list[str] = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if (
            tok.startswith("--")
            and "=" not in tok
            and i + 1 < len(argv)
            and _NEGATIVE_VALUE.match(argv[i + 1])
        ):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_glue_negative_values(argv))
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return args.func(args)
    except (UsageError, DomainError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
