"""Command-line front end.

Subcommands: ``analyze`` (one time point), ``sweep`` (time grid, optional
reference comparison), ``importance`` (fuzzy importance ranking),
``simulate`` (Monte Carlo estimate), ``validate`` (diagnostics only).

Exit codes: 0 success, 2 usage, 3 parse/validation failure, 4 numeric
failure, 5 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__, mc
from .engine import AnalysisConfig, AnalysisReport, sweep
from .errors import DomainError, NumericError, TreeFormatError, TreeStructureError
from .model import validate as validate_tree
from .parser import parse_tree
from .tfn import Spread

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INVALID = 3
EXIT_NUMERIC = 4
EXIT_IO = 5


def _fmt(x: float) -> str:
    return f"{x:.8g}"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fuzzytft",
        description="Quantify temporal fault trees (AND/OR/PAND/POR) under fuzzy failure rates.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, times=False, time=False):
        p.add_argument("input", help="tree document (text or JSON)")
        p.add_argument("--spread", type=float, default=None,
                       help="override the document fuzzification spread (percent)")
        p.add_argument("--nonstandard-spread", action="store_true",
                       help="allow spreads outside the standard {15, 25, 50}")
        p.add_argument("--clamp", action="store_true",
                       help="clamp fuzzy bounds to [0,1] and saturate probability-to-rate "
                            "conversions near 1")
        p.add_argument("-o", "--output", default=None, help="write output here instead of stdout")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        if times:
            p.add_argument("--times", default=None,
                           help="comma-separated mission times (defaults to the document's)")
        if time:
            p.add_argument("--time", type=float, required=True, help="mission time")

    p_analyze = sub.add_parser("analyze", help="evaluate the top event at one mission time")
    add_common(p_analyze, time=True)

    p_sweep = sub.add_parser("sweep", help="evaluate the top event over a time grid")
    add_common(p_sweep, times=True)
    p_sweep.add_argument("--reference", default=None,
                         help="CSV of published values (t,petri_net,bayesian_network,proposed) "
                              "to compare against")
    p_sweep.add_argument("--interpretation", choices=("defuzzified", "peak"),
                         default="defuzzified",
                         help="which column is compared against the reference values")

    p_imp = sub.add_parser("importance", help="rank basic events by fuzzy importance")
    add_common(p_imp, time=True)

    p_sim = sub.add_parser("simulate", help="Monte Carlo estimate of the top-event probability")
    add_common(p_sim, time=True)
    p_sim.add_argument("--samples", type=int, default=1_000_000)
    p_sim.add_argument("--seed", type=int, default=0)

    p_val = sub.add_parser("validate", help="check a tree document and print diagnostics")
    p_val.add_argument("input")
    p_val.add_argument("--spread", type=float, default=None)
    p_val.add_argument("--nonstandard-spread", action="store_true")

    return parser


def _load_tree(args):
    try:
        with open(args.input, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise _IoFailure(f"cannot read {args.input}: {exc}") from exc
    override = None
    if args.spread is not None:
        override = Spread(args.spread, nonstandard=args.nonstandard_spread)
    return parse_tree(
        text,
        source=args.input,
        spread_override=override,
        allow_nonstandard_spread=args.nonstandard_spread,
    )


class _IoFailure(Exception):
    pass


def _emit(text: str, output: str | None):
    if output is None:
        sys.stdout.write(text)
        return
    try:
        with open(output, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
    except OSError as exc:
        raise _IoFailure(f"cannot write {output}: {exc}") from exc


def _report_text(report: AnalysisReport, fmt: str, kind: str) -> str:
    if fmt == "json":
        return json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"
    if kind == "importance":
        return report.importance_to_csv()
    return report.to_csv()


def _times_from(args, tree):
    if getattr(args, "times", None):
        try:
            return tuple(float(v) for v in args.times.split(","))
        except ValueError:
            raise DomainError(f"bad --times list {args.times!r}") from None
    if getattr(args, "time", None) is not None:
        return (args.time,)
    if tree.times:
        return tree.times
    raise DomainError("no mission times: pass --times or add a times= directive")


def _read_reference(path: str) -> list[dict[str, float]]:
    rows = []
    try:
        with open(path, "r", encoding="utf-8") as handle:
            header: list[str] | None = None
            for raw in handle:
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if header is None:
                    header = [col.strip() for col in line.split(",")]
                    continue
                values = line.split(",")
                if len(values) != len(header):
                    raise DomainError(f"reference row {line!r} does not match header {header}")
                rows.append({k: float(v) for k, v in zip(header, values)})
    except OSError as exc:
        raise _IoFailure(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise DomainError(f"reference file {path} contains no rows")
    return rows


def _sweep_with_reference(report: AnalysisReport, rows: list[dict[str, float]],
                          interpretation: str) -> str:
    ref_cols = [c for c in rows[0] if c != "t"]
    by_t = {row["t"]: row for row in rows}
    header = ["t", "te_lower", "te_peak", "te_upper", "te_defuzzified"]
    for col in ref_cols:
        header += [col, f"delta_abs_{col}", f"delta_rel_{col}"]
    lines = [",".join(header)]
    for entry in report.entries:
        row = by_t.get(entry.t)
        if row is None:
            raise DomainError(f"reference file has no row for t={_fmt(entry.t)}")
        value = entry.defuzzified if interpretation == "defuzzified" else entry.peak
        p = entry.probability
        cells = [_fmt(entry.t), _fmt(p.lower), _fmt(p.peak), _fmt(p.upper), _fmt(entry.defuzzified)]
        for col in ref_cols:
            ref = row[col]
            delta = abs(value - ref)
            rel = delta / abs(ref) if ref != 0 else float("inf")
            cells += [_fmt(ref), _fmt(delta), _fmt(rel)]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def run(args) -> int:
    if args.command == "validate":
        try:
            tree = _load_tree(args)
        except TreeStructureError as exc:
            for diag in exc.diagnostics:
                sys.stderr.write(f"{args.input}: {diag}\n")
            return EXIT_INVALID
        for diag in validate_tree(tree):
            sys.stdout.write(f"{args.input}: {diag}\n")
        return EXIT_OK

    tree = _load_tree(args)

    if args.command == "analyze":
        config = AnalysisConfig(times=(args.time,), clamp=args.clamp)
        report = sweep(tree, config)
        _emit(_report_text(report, args.format, "analyze"), args.output)
        return EXIT_OK

    if args.command == "sweep":
        config = AnalysisConfig(times=_times_from(args, tree), clamp=args.clamp)
        report = sweep(tree, config)
        if args.reference is not None:
            rows = _read_reference(args.reference)
            text = _sweep_with_reference(report, rows, args.interpretation)
            if args.format == "json":
                raise DomainError("--reference output is CSV only")
        else:
            text = _report_text(report, args.format, "sweep")
        _emit(text, args.output)
        return EXIT_OK

    if args.command == "importance":
        config = AnalysisConfig(
            times=(args.time,), clamp=args.clamp, importance=True, importance_time=args.time
        )
        report = sweep(tree, config)
        _emit(_report_text(report, args.format, "importance"), args.output)
        return EXIT_OK

    if args.command == "simulate":
        estimate = mc.simulate_tree(
            tree, mc.SimulationConfig(samples=args.samples, seed=args.seed, t=args.time)
        )
        if args.format == "json":
            text = json.dumps(
                {
                    "t": args.time,
                    "probability": estimate.probability,
                    "std_error": estimate.std_error,
                    "samples": estimate.samples,
                    "seed": args.seed,
                },
                indent=2,
                sort_keys=True,
            ) + "\n"
        else:
            text = (
                "t,probability,std_error,samples,seed\n"
                f"{_fmt(args.time)},{_fmt(estimate.probability)},"
                f"{_fmt(estimate.std_error)},{estimate.samples},{args.seed}\n"
            )
        _emit(text, args.output)
        return EXIT_OK

    raise AssertionError(f"unhandled command {args.command}")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return run(args)
    except TreeFormatError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INVALID
    except TreeStructureError as exc:
        for diag in exc.diagnostics:
            sys.stderr.write(f"error: {diag}\n")
        return EXIT_INVALID
    except NumericError as exc:
        sys.stderr.write(f"numeric error: {exc}\n")
        return EXIT_NUMERIC
    except DomainError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except _IoFailure as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
