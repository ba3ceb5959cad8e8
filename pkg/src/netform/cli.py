"""Command-line entry point.

Exit status: 0 on success, 1 for invalid input (bad scenario, missing file,
malformed graph), 2 when an exhaustive search exceeds its size cap.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
import time
from pathlib import Path

from . import __version__, analysis
from .enumeration import EnumerationCapError, default_threads
from .model import StateDependent
from .scenario import (
    AnalysisReport,
    GraphFormat,
    Scenario,
    ScenarioError,
    emit_report,
    export_graph,
    parse_graph,
    parse_scenario,
    scenario_from_dict,
)

log = logging.getLogger("netform")

EXIT_OK, EXIT_INVALID, EXIT_CAP = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _threads(value: str) -> int:
    n = int(value)
    if n < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return n


def _seed(value: str) -> int:
    n = int(value)
    if not 0 <= n < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return n


def _epsilon(value: str) -> float:
    x = float(value)
    if not x > 0:
        raise argparse.ArgumentTypeError("epsilon must be positive")
    return x


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("scenario", help="scenario JSON file")
    common.add_argument("--out", metavar="PATH", help="write the JSON report here instead of stdout")
    common.add_argument(
        "--format",
        choices=[f.value for f in GraphFormat],
        help="print the headline graph in this format on stdout (the report then goes only to --out)",
    )
    common.add_argument("--seed", type=_seed, help="override the scenario seed")
    common.add_argument(
        "--threads", type=_threads, help="worker count (default: $NETFORM_THREADS, else all processors)"
    )
    common.add_argument("--epsilon", type=_epsilon, help="override the comparison tolerance")
    common.add_argument("-v", "--verbose", action="count", default=0, help="more log output on stderr")
    common.add_argument("-q", "--quiet", action="store_true", help="only errors on stderr")

    parser = _Parser(prog="netform", description="Connection-model network formation analyses.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND", parser_class=_Parser)
    sub.add_parser("efficient", parents=[common], help="efficient structures")
    sub.add_parser("stable", parents=[common], help="all pairwise-stable graphs")
    sub.add_parser("poa", parents=[common], help="price of anarchy")
    dyn = sub.add_parser("dynamics", parents=[common], help="seeded link-formation dynamics")
    dyn.add_argument("--trace", metavar="PATH", help="write one JSON line per round")
    sw = sub.add_parser("sweep", parents=[common], help="heterogeneity/capacity modularity sweep")
    sw.add_argument("--csv", metavar="PATH", help="write heterogeneity,capacity,mean_q,sd_q rows")
    chk = sub.add_parser("check", parents=[common], help="efficiency gap and stability of a given graph")
    chk.add_argument("--graph", metavar="PATH", required=True, help="graph file, edge list or JSON")
    return parser


def _effective(sc: Scenario, args) -> Scenario:
    """Apply command-line overrides and re-validate, so the echo reproduces the run."""
    doc = sc.to_dict()
    if args.command != "check":
        doc["analysis"] = args.command
    if args.seed is not None:
        doc["params"]["seed"] = args.seed
    if args.epsilon is not None:
        doc["params"]["epsilon"] = args.epsilon
    out = scenario_from_dict(doc)
    if args.command == "check" and isinstance(out.cost, StateDependent) and out.states is None:
        raise ScenarioError([("/profiles/states", "state-dependent cost needs node states for this analysis")])
    return out


def _write(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _execute(args) -> int:
    threads = args.threads or default_threads()
    sc = _effective(parse_scenario(Path(args.scenario).read_bytes()), args)
    log.info("scenario %s: n=%d, %s, threads=%d", args.scenario, sc.n, args.command, threads)

    if args.command == "check":
        g = parse_graph(Path(args.graph).read_text(encoding="utf-8"), sc.n, sc.label_map())
        start = time.perf_counter()
        results = analysis.check(sc, g, threads)
        report = AnalysisReport(sc, "check", results, __version__, {"check": time.perf_counter() - start})
        headline = g
    elif args.command == "dynamics" and args.trace:
        with open(args.trace, "w", encoding="utf-8") as fh:
            def on_round(rec):
                fh.write(json.dumps(rec.to_json(), sort_keys=True, allow_nan=False) + "\n")

            report, headline = analysis.run_analysis(sc, "dynamics", threads, on_round)
    else:
        report, headline = analysis.run_analysis(sc, args.command, threads)

    for name, seconds in report.timings.items():
        log.info("timing %s: %.3f s", name, seconds)

    if args.command == "sweep" and args.csv:
        with open(args.csv, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["heterogeneity", "capacity", "mean_q", "sd_q"])
            for row in report.results["rows"]:
                w.writerow([repr(row[k]) for k in ("heterogeneity", "capacity", "mean_q", "sd_q")])

    text = emit_report(report)
    if args.format:
        if headline is None:
            log.error("%s produces no graph to export", args.command)
            return EXIT_INVALID
        sys.stdout.write(export_graph(headline, args.format))
        if args.out:
            _write(args.out, text)
    else:
        _write(args.out, text)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.ERROR if args.quiet else (logging.WARNING, logging.INFO, logging.DEBUG)[min(args.verbose, 2)]
    logging.basicConfig(level=level, format="netform: %(message)s", stream=sys.stderr, force=True)
    try:
        return _execute(args)
    except ScenarioError as exc:
        for path, msg in exc.errors:
            log.error("%s: %s", path or "/", msg)
        return EXIT_INVALID
    except EnumerationCapError as exc:
        log.error("%s", exc)
        return EXIT_CAP
    except (OSError, ValueError) as exc:
        log.error("%s", exc)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
