"""Command-line front end: ``list``, ``verify``, ``suite`` and ``dump``."""

from __future__ import annotations

import argparse
import csv
import json
import sys
from fractions import Fraction

from .errors import QSeriesError
from .identities import CATALOGUE, JOBS_ENV, json_exponent, json_value, parse_suite, run_suite, side_series, verify
from .qseries import fmt_exp, to_grid

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE = 0, 1, 2


def _order(text: str) -> Fraction:
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"order must be a number, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError("order must be >= 1")
    try:
        to_grid(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    return value


def _param(text: str):
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    key, value = text.split("=", 1)
    return key.strip(), value.strip()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hlrr", description="Exact q-series verification of Rogers-Ramanujan-type identities.")
    sub = parser.add_subparsers(dest="command", required=True)

    def fmt(p):
        p.add_argument("--format", choices=("text", "json", "csv"), default="text")

    p_list = sub.add_parser("list", help="print the catalogue with parameter schemas")
    fmt(p_list)

    p_verify = sub.add_parser("verify", help="verify one identity")
    p_verify.add_argument("--id", required=True)
    p_verify.add_argument("--param", action="append", type=_param, default=[], metavar="KEY=VALUE")
    p_verify.add_argument("--order", type=_order, default=Fraction(40))
    p_verify.add_argument("--seed", type=int, default=None)
    p_verify.add_argument("--perturb", type=int, default=0, help="add this to kappa on the product side (negative control)")
    p_verify.add_argument("--no-timings", action="store_true", help="zero the elapsed fields for byte-stable output")
    fmt(p_verify)

    p_suite = sub.add_parser("suite", help="run a suite file of 'id key=value ... order=N' lines")
    p_suite.add_argument("--file", required=True)
    p_suite.add_argument("--jobs", type=int, default=None, help=f"worker processes (default from ${JOBS_ENV}, else 1)")
    p_suite.add_argument("--no-timings", action="store_true")
    fmt(p_suite)

    p_dump = sub.add_parser("dump", help="print the coefficient table of one side")
    p_dump.add_argument("--id", required=True)
    p_dump.add_argument("--param", action="append", type=_param, default=[], metavar="KEY=VALUE")
    p_dump.add_argument("--side", default="lhs", help="lhs, rhs, or the name of a right-hand form")
    p_dump.add_argument("--order", type=_order, default=Fraction(20))
    fmt(p_dump)
    return parser


def _emit_reports(reports, fmt: str, timings: bool, out) -> None:
    dicts = [r.to_dict(timings) for r in reports]
    if fmt == "json":
        out.write(json.dumps(dicts, indent=2) + "\n")
    elif fmt == "csv":
        w = csv.writer(out, lineterminator="\n")
        cols = ["id", "params", "order_q", "match", "first_mismatch_q", "elapsed_ms_lhs", "elapsed_ms_rhs", "seed", "notes"]
        w.writerow(cols)
        for d in dicts:
            row = dict(d)
            row["params"] = " ".join(f"{k}={v}" for k, v in d["params"].items())
            row["notes"] = json.dumps(d["notes"], sort_keys=True)
            w.writerow([row[c] for c in cols])
    else:
        for d in dicts:
            params = " ".join(f"{k}={v}" for k, v in d["params"].items())
            status = "MATCH" if d["match"] else "MISMATCH"
            line = f"{status:8} {d['id']} {params} order={d['order_q']}"
            if d["first_mismatch_q"] is not None:
                line += f" first_mismatch=q^{d['first_mismatch_q']}"
            if "error" in d["notes"]:
                line += f" error={d['notes']['error']}"
            out.write(line + "\n")


def _cmd_list(args, out) -> int:
    rows = [
        {"id": spec.id, "params": spec.schema(), "description": spec.description, "forms": list(spec.rhs)}
        for spec in CATALOGUE.values()
    ]
    if args.format == "json":
        out.write(json.dumps(rows, indent=2) + "\n")
    elif args.format == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["id", "params", "forms", "description"])
        for r in rows:
            w.writerow([r["id"], " ".join(r["params"]), " ".join(r["forms"]), r["description"]])
    else:
        width = max(len(r["id"]) for r in rows)
        for r in rows:
            params = ", ".join(k + (f"={v['default']}" if "default" in v else "") for k, v in r["params"].items())
            out.write(f"{r['id']:<{width}}  ({params})  {r['description']}\n")
    return EXIT_OK


def _cmd_verify(args, out) -> int:
    report = verify(args.id, dict(args.param), args.order, seed=args.seed, perturb=args.perturb)
    if args.format == "json":
        out.write(report.to_json(not args.no_timings) + "\n")
    else:
        _emit_reports([report], args.format, not args.no_timings, out)
    return EXIT_OK if report.match else EXIT_MISMATCH


def _cmd_suite(args, out) -> int:
    try:
        with open(args.file, encoding="utf-8") as fh:
            rows = parse_suite(fh.read())
    except OSError as exc:
        raise QSeriesError(f"cannot read suite file: {exc}") from None
    reports = run_suite(rows, args.jobs)
    _emit_reports(reports, args.format, not args.no_timings, out)
    if any("error" in r.notes for r in reports):
        return EXIT_USAGE if all("error" in r.notes for r in reports) else EXIT_MISMATCH
    return EXIT_OK if all(r.match for r in reports) else EXIT_MISMATCH


def dump_rows(series, order) -> list:
    """``(exponent, coefficient)`` on the series' grid from ``min(0, valuation)`` through ``order``."""
    hi = to_grid(order)
    step = 2 if series.on_integer_grid() else 1
    v = series.valuation_s()
    start = 0 if v is None else min(0, v - v % step)
    return [(s, series.coeff_s(s)) for s in range(start, hi + 1, step)]


def _num(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _cmd_dump(args, out) -> int:
    series = side_series(args.id, dict(args.param), args.order, args.side)
    rows = dump_rows(series, args.order)
    if args.format == "json":
        out.write(json.dumps([[json_exponent(s), json_value(c)] for s, c in rows]) + "\n")
    elif args.format == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["exponent", "coefficient"])
        for s, c in rows:
            w.writerow([fmt_exp(s), _num(c)])
    else:
        for s, c in rows:
            out.write(f"q^{fmt_exp(s)}\t{_num(c)}\n")
    return EXIT_OK


def run_cli(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    handlers = {"list": _cmd_list, "verify": _cmd_verify, "suite": _cmd_suite, "dump": _cmd_dump}
    try:
        return handlers[args.command](args, out)
    except (QSeriesError, ValueError, ZeroDivisionError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"hlrr: error: {msg}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
