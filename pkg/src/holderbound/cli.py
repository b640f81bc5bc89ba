"""Command-line front end.

Exit status: 0 when the chain holds, 2 on a chain violation, 1 on usage,
parse, domain or validation errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from pathlib import Path
from typing import Sequence

from . import __version__
from .chain import ConjugateExponents
from .expr import ExprError, parse
from .harness import FAMILIES, SweepConfig, run_sweep
from .hermite import HHInput, hh_report
from .integral import WeightPartition, split_point_bound, verify_chain
from .quadrature import Interval, QuadratureError
from .sums import DiscreteWeightPartition, read_rows, read_tuple, verify_sum_chain

EXIT_OK, EXIT_ERROR, EXIT_VIOLATION = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit 2, which means "violation" here
        raise UsageError(message)


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="holderbound", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="mode", required=True, parser_class=_Parser)

    def output_flags(p, with_csv=True):
        group = p.add_mutually_exclusive_group()
        group.add_argument("--json", action="store_true", help="machine-readable JSON record")
        if with_csv:
            group.add_argument("--csv", action="store_true", help="one CSV row with header")
        p.add_argument("--tol", type=float, help="absolute report tolerance (overrides HOLDER_TOL)")

    p = sub.add_parser("integral", help="integral Hölder chain")
    p.add_argument("--f", required=True)
    p.add_argument("--g", required=True)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--p", type=float, required=True)
    part = p.add_mutually_exclusive_group()
    part.add_argument("--weights", help="comma-separated weight expressions")
    part.add_argument("--linear", action="store_true", help="(b-x)/(b-a), (x-a)/(b-a) [default]")
    part.add_argument("--trig", action="store_true", help="sin(x)^2, cos(x)^2")
    p.add_argument("--lambda", dest="lam", type=float, help="also report the split-point bound")
    output_flags(p)

    p = sub.add_parser("sum", help="discrete Hölder chain")
    p.add_argument("--a", required=True, help="comma list or file")
    p.add_argument("--b", required=True, help="comma list or file")
    p.add_argument("--p", type=float, required=True)
    part = p.add_mutually_exclusive_group()
    part.add_argument("--weights", help="CSV file, one partition row per line")
    part.add_argument("--linear", action="store_true", help="c_k = k/n, d_k = (n-k)/n [default]")
    part.add_argument("--trig", action="store_true", help="sin^2 k, cos^2 k")
    output_flags(p)

    p = sub.add_parser("hh", help="trapezoid defect bounds")
    p.add_argument("--f", required=True)
    p.add_argument("--fprime", required=True)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--p", type=float, required=True)
    output_flags(p)

    p = sub.add_parser("sweep", help="randomized chain sweep")
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--family", choices=FAMILIES, default="mixed")
    p.add_argument("--p-low", type=float, default=1.05)
    p.add_argument("--p-high", type=float, default=10.0)
    p.add_argument("--n-max", type=int, default=10_000, help="largest tuple length")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--keep-reports", action="store_true")
    p.add_argument("--out", help="write the JSON summary here instead of stdout")
    p.add_argument("--csv", dest="csv_out", help="also write one CSV row per trial here")
    p.add_argument("--tol", type=float, help="absolute report tolerance (overrides HOLDER_TOL)")
    return parser


def _tolerance(args) -> float | None:
    if args.tol is not None:
        return args.tol
    env = os.environ.get("HOLDER_TOL")
    if env:
        try:
            return float(env)
        except ValueError:
            raise UsageError(f"HOLDER_TOL is not a number: {env!r}") from None
    return None


def _load_values(source: str) -> list[float]:
    path = Path(source)
    text = path.read_text() if path.is_file() else source
    try:
        return read_tuple(text)
    except ValueError as exc:
        raise UsageError(f"cannot read tuple {source!r}: {exc}") from None


def _record(mode: str, inputs: dict, results: dict) -> dict:
    return {"mode": mode, "inputs": inputs, "results": results, "version": __version__}


def _cell(v) -> str:
    if isinstance(v, bool):
        return str(v).lower()
    return repr(v) if isinstance(v, float) else str(v)


def _emit(record: dict, args, out) -> None:
    results = record["results"]
    if getattr(args, "json", False):
        out.write(json.dumps(record, indent=2, allow_nan=False) + "\n")
        return
    flat = {}
    for key, value in results.items():
        if isinstance(value, list):
            for i, v in enumerate(value, start=1):
                flat[f"{key}_{i}"] = v
        else:
            flat[key] = value
    if getattr(args, "csv", False):
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["mode", *flat])
        writer.writerow([record["mode"], *(_cell(v) for v in flat.values())])
        return
    width = max(len(k) for k in flat)
    for key, value in flat.items():
        shown = repr(value) if isinstance(value, float) else str(value).lower()
        out.write(f"{key:<{width}}  {shown}\n")


def cmd_integral(args, out) -> int:
    interval = Interval(args.a, args.b)
    exps = ConjugateExponents.from_p(args.p)
    f, g = parse(args.f), parse(args.g)
    if args.weights:
        kind = "weights"
        partition = WeightPartition(tuple(parse(w) for w in args.weights.split(",")), interval)
    elif args.trig:
        kind = "trig"
        partition = WeightPartition.trig(interval)
    else:
        kind = "linear"
        partition = WeightPartition.linear(interval)
    report = verify_chain(f, g, exps, partition, report_tol=_tolerance(args))
    results = report.to_dict()
    if args.lam is not None:
        results["split_point"] = split_point_bound(f, g, exps, interval, args.lam)
    inputs = {
        "f": args.f, "g": args.g, "a": args.a, "b": args.b, "p": args.p, "q": exps.q,
        "partition": kind, "weights": [str(w) for w in partition.weights],
    }
    if args.lam is not None:
        inputs["lambda"] = args.lam
    _emit(_record("integral", inputs, results), args, out)
    return EXIT_OK if report.chain_ok else EXIT_VIOLATION


def cmd_sum(args, out) -> int:
    a, b = _load_values(args.a), _load_values(args.b)
    exps = ConjugateExponents.from_p(args.p)
    if len(a) != len(b):
        raise UsageError(f"length mismatch: a has {len(a)} entries, b has {len(b)}")
    if args.weights:
        kind = "weights"
        partition = DiscreteWeightPartition(read_rows(Path(args.weights).read_text()))
    elif args.trig:
        kind = "trig"
        partition = DiscreteWeightPartition.trig(len(a))
    else:
        kind = "linear"
        partition = DiscreteWeightPartition.linear(len(a))
    report = verify_sum_chain(a, b, exps, partition, _tolerance(args))
    inputs = {"a": a, "b": b, "p": args.p, "q": exps.q, "partition": kind,
              "rows": partition.rows.tolist()}
    _emit(_record("sum", inputs, report.to_dict()), args, out)
    return EXIT_OK if report.chain_ok else EXIT_VIOLATION


def cmd_hh(args, out) -> int:
    inp = HHInput(parse(args.f), parse(args.fprime), Interval(args.a, args.b),
                  ConjugateExponents.from_p(args.p))
    report = hh_report(inp, report_tol=_tolerance(args))
    inputs = {"f": args.f, "fprime": args.fprime, "a": args.a, "b": args.b, "p": args.p,
              "q": inp.exps.q}
    _emit(_record("hh", inputs, report.to_dict()), args, out)
    ok = report.ordering_ok and (report.bound_ok or not report.convexity_ok)
    return EXIT_OK if ok else EXIT_VIOLATION


def _trial_rows(summary) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["trial", "lower", "refined", "upper", "gap_refined", "gap_lhs", "ok"])
    for item in summary.all_reports:
        r = item["report"]
        if "defect" in r:
            lower, mid, upper = r["defect"], r["refined"], r["dragomir"]
            ok = r["ordering_ok"] and (r["bound_ok"] or not r["convexity_ok"])
        else:
            lower, mid, upper = r["lhs"], r["refined_total"], r["classical"]
            ok = r["chain_ok"]
        writer.writerow([item["trial"], repr(lower), repr(mid), repr(upper),
                         repr(upper - mid), repr(mid - lower), str(ok).lower()])
    return buf.getvalue()


def cmd_sweep(args, out) -> int:
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    config = SweepConfig(
        trials=args.trials, seed=args.seed, family=args.family,
        p_range=(args.p_low, args.p_high), n_range=(1, args.n_max),
        report_tol=_tolerance(args), keep_reports=args.keep_reports,
    )
    summary = run_sweep(config, jobs=args.jobs)
    text = summary.to_json()
    if args.out:
        Path(args.out).write_text(text)
    else:
        out.write(text)
    if args.csv_out:
        Path(args.csv_out).write_text(_trial_rows(summary))
    if summary.errors:
        print(f"warning: {len(summary.errors)} trial(s) failed to evaluate", file=sys.stderr)
    return EXIT_OK if summary.ok else EXIT_VIOLATION


_COMMANDS = {"integral": cmd_integral, "sum": cmd_sum, "hh": cmd_hh, "sweep": cmd_sweep}


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = _build_parser().parse_args(argv)
        return _COMMANDS[args.mode](args, out)
    except UsageError as exc:
        print(f"holderbound: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (ExprError, ValueError, QuadratureError, OSError) as exc:
        print(f"holderbound: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
