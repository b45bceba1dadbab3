"""Command-line front end.

Commands: verify, mra, filters, synthesize, transform, search.  Every
command produces a report (JSON by default) whose bytes depend only on
the inputs and the tool version; timing is only filled in when --timing
is passed so reports stay byte-stable.  Exit codes: 0 for PASS, 1 for
FAIL or INCONCLUSIVE or resource limits, 2 for input errors.
"""

from __future__ import annotations

import argparse
import sys
import time

from . import __version__
from .errors import SchemaError, VilenkinError
from .famio import (
    build_report,
    emit_report,
    family_to_document,
    measure_json,
    parse_family_file,
    verdict_conditions,
)
from .mra import accumulate_omega_sigma, build_filters, check_mra_condition, verify_filter_identities
from .transform import QuotientGrid, forward, inverse, read_csv, synthesize_wavelet, write_csv
from .verifier import is_wavelet_set, search_wavelet_sets


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vilenkin-wavelets",
        description="Exact wavelet-set verification and construction on Vilenkin groups",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, *, needs_input: bool = True):
        p.add_argument("--p", type=int, required=True, help="digit base")
        if needs_input:
            p.add_argument("--input", required=True, help="family file (JSON)")
        p.add_argument("--output", help="write the report to this file")
        p.add_argument("--format", choices=("json", "text"), default="json")
        p.add_argument("--timing", action="store_true", help="include wall time")

    v = sub.add_parser("verify", help="decide the wavelet-set conditions")
    common(v)
    v.add_argument("--extra-range", type=int, default=0,
                   help="widen the derived finite check ranges (robustness)")

    m = sub.add_parser("mra", help="verify plus the scaling-spectrum criterion")
    common(m)
    m.add_argument("--depth", type=int, default=20, help="truncation depth J")

    f = sub.add_parser("filters", help="construct filters and check their identities")
    common(f)
    f.add_argument("--depth", type=int, default=20)
    f.add_argument("--level", type=int, default=4, help="identity check resolution")
    f.add_argument("--tolerance", type=float, default=1e-10)

    s = sub.add_parser("synthesize", help="sample a wavelet onto a grid as CSV")
    common(s)
    s.add_argument("--grid", type=int, nargs=2, metavar=("M", "N"), required=True)
    s.add_argument("--set", type=int, default=1, dest="member",
                   help="which member set (1-based)")
    s.add_argument("--samples", required=True, help="CSV output path")

    t = sub.add_parser("transform", help="forward/inverse transform of a CSV signal")
    t.add_argument("--p", type=int, required=True)
    t.add_argument("--grid", type=int, nargs=2, metavar=("M", "N"), required=True)
    t.add_argument("--direction", choices=("forward", "inverse"), default="forward")
    t.add_argument("--input", required=True, help="CSV signal path")
    t.add_argument("--samples", required=True, help="CSV output path")
    t.add_argument("--output", help="write the report to this file")
    t.add_argument("--format", choices=("json", "text"), default="json")
    t.add_argument("--timing", action="store_true")
    t.add_argument("--tolerance", type=float, default=1e-10)

    q = sub.add_parser("search", help="enumerate wavelet families in a digit window")
    q.add_argument("--p", type=int, required=True)
    q.add_argument("--window", type=int, nargs=2, metavar=("LO", "HI"), required=True)
    q.add_argument("--resolution", type=int, default=None)
    q.add_argument("--budget", type=int, default=None)
    q.add_argument("--output", help="write the report to this file")
    q.add_argument("--format", choices=("json", "text"), default="json")
    q.add_argument("--timing", action="store_true")

    return parser


def _load_family(args):
    family = parse_family_file(args.input)
    if family.p != args.p:
        raise SchemaError(
            f"--p {args.p} does not match the family file base {family.p}"
        )
    return family


def _cmd_verify(args) -> tuple[dict, int]:
    family = _load_family(args)
    report = is_wavelet_set(family, extra_range=args.extra_range)
    verdict = "PASS" if report.overall else "FAIL"
    doc = build_report(
        version=__version__,
        command="verify",
        parameters={"p": args.p, "input": args.input, "extra_range": args.extra_range},
        verdict=verdict,
        conditions=verdict_conditions(report),
        extra={"certificate": report.certificate},
    )
    return doc, 0 if report.overall else 1


def _mra_condition_json(mra) -> dict:
    return {
        "name": "scaling-spectrum-translates",
        "passed": mra.passed,
        "exact": mra.certified,
        "witnesses": mra.witnesses,
        "measures": {
            "status": mra.status,
            "certification": mra.certification,
            "depth": mra.depth,
            "rows": [
                {
                    "lattice_index": row.lattice_index,
                    "measure": measure_json(row.measure),
                    "expected": row.expected(mra.depth),
                }
                for row in mra.rows
            ],
        },
    }


def _cmd_mra(args) -> tuple[dict, int]:
    family = _load_family(args)
    verdict_report = is_wavelet_set(family)
    conditions = verdict_conditions(verdict_report)
    params = {"p": args.p, "input": args.input, "depth": args.depth}
    if not verdict_report.overall:
        doc = build_report(
            version=__version__, command="mra", parameters=params,
            verdict="FAIL", conditions=conditions,
        )
        return doc, 1
    sigma = accumulate_omega_sigma(family, args.depth, verdict=verdict_report)
    mra = check_mra_condition(sigma)
    conditions.append(_mra_condition_json(mra))
    verdict = mra.status
    doc = build_report(
        version=__version__, command="mra", parameters=params,
        verdict=verdict, conditions=conditions,
        extra={
            "spectrum": {
                "depth": sigma.depth,
                "tail_bound": measure_json(sigma.tail_bound()),
                "truncated_measure": measure_json(sigma.truncated.measure()),
                "self_similar_tail_resolved": sigma.self_similar_tail_resolved,
            }
        },
    )
    return doc, 0 if verdict == "PASS" else 1


def _cmd_filters(args) -> tuple[dict, int]:
    family = _load_family(args)
    verdict_report = is_wavelet_set(family)
    params = {
        "p": args.p, "input": args.input, "depth": args.depth,
        "level": args.level, "tolerance": args.tolerance,
    }
    conditions = verdict_conditions(verdict_report)
    if not verdict_report.overall:
        doc = build_report(
            version=__version__, command="filters", parameters=params,
            verdict="FAIL", conditions=conditions,
        )
        return doc, 1
    sigma = accumulate_omega_sigma(family, args.depth, verdict=verdict_report)
    mra = check_mra_condition(sigma)
    conditions.append(_mra_condition_json(mra))
    if not mra.passed:
        doc = build_report(
            version=__version__, command="filters", parameters=params,
            verdict=mra.status, conditions=conditions,
        )
        return doc, 1
    bank = build_filters(family, sigma, mra=mra)
    identities = verify_filter_identities(bank, args.level, tolerance=args.tolerance)
    conditions.append(
        {
            "name": "filter-identities",
            "passed": identities.passed,
            "exact": identities.exact,
            "witnesses": identities.failing_cells,
            "measures": {
                "level": identities.level,
                "checked_cells": identities.checked_cells,
                "skipped_cells": identities.skipped_cells,
                "skipped_mass": measure_json(identities.skipped_mass),
                "formulations_agree": identities.formulations_agree,
            },
        }
    )
    verdict = "PASS" if identities.passed else "FAIL"
    doc = build_report(
        version=__version__, command="filters", parameters=params,
        verdict=verdict, conditions=conditions,
        extra={"filters": bank.to_json()},
    )
    return doc, 0 if identities.passed else 1


def _cmd_synthesize(args) -> tuple[dict, int]:
    family = _load_family(args)
    if not 1 <= args.member <= family.p - 1:
        raise SchemaError(f"--set must be in [1, {family.p - 1}]")
    grid = QuotientGrid(args.p, args.grid[0], args.grid[1])
    psi = synthesize_wavelet(family.sets[args.member - 1], grid)
    with open(args.samples, "w", encoding="utf-8") as handle:
        write_csv(psi, handle)
    doc = build_report(
        version=__version__, command="synthesize",
        parameters={
            "p": args.p, "input": args.input, "grid": list(args.grid),
            "set": args.member, "samples": args.samples,
        },
        verdict="PASS",
        conditions=[
            {
                "name": "synthesis",
                "passed": True,
                "exact": False,
                "witnesses": [],
                "measures": {"norm": psi.norm(), "cells": grid.size},
            }
        ],
    )
    return doc, 0


def _cmd_transform(args) -> tuple[dict, int]:
    primal = QuotientGrid(args.p, args.grid[0], args.grid[1])
    in_grid = primal if args.direction == "forward" else primal.dual()
    with open(args.input, "r", encoding="utf-8") as handle:
        signal = read_csv(in_grid, handle)
    result = forward(signal) if args.direction == "forward" else inverse(signal)
    with open(args.samples, "w", encoding="utf-8") as handle:
        write_csv(result, handle)
    round_trip = inverse(result) if args.direction == "forward" else forward(result)
    drift = float(max(abs(round_trip.values - signal.values)))
    passed = drift <= args.tolerance
    doc = build_report(
        version=__version__, command="transform",
        parameters={
            "p": args.p, "grid": list(args.grid), "direction": args.direction,
            "input": args.input, "samples": args.samples,
            "tolerance": args.tolerance,
        },
        verdict="PASS" if passed else "FAIL",
        conditions=[
            {
                "name": "round-trip",
                "passed": passed,
                "exact": False,
                "witnesses": [],
                "measures": {
                    "input_norm": signal.norm(),
                    "output_norm": result.norm(),
                    "round_trip_error": drift,
                },
            }
        ],
    )
    return doc, 0 if passed else 1


def _cmd_search(args) -> tuple[dict, int]:
    result = search_wavelet_sets(
        args.p, tuple(args.window), resolution=args.resolution, budget=args.budget
    )
    verdict = "PASS" if not result.exhausted else "INCONCLUSIVE"
    doc = build_report(
        version=__version__, command="search",
        parameters={
            "p": args.p, "window": list(args.window),
            "resolution": args.resolution, "budget": args.budget,
        },
        verdict=verdict,
        conditions=[
            {
                "name": "enumeration",
                "passed": not result.exhausted,
                "exact": True,
                "witnesses": [],
                "measures": {
                    "examined": result.examined,
                    "found": len(result.families),
                    "exhausted": result.exhausted,
                },
            }
        ],
        extra={"families": [family_to_document(f) for f in result.families]},
    )
    return doc, 0 if not result.exhausted else 1


_HANDLERS = {
    "verify": _cmd_verify,
    "mra": _cmd_mra,
    "filters": _cmd_filters,
    "synthesize": _cmd_synthesize,
    "transform": _cmd_transform,
    "search": _cmd_search,
}


def _run(argv: list[str]) -> tuple[int, dict | None, object | None]:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse handles --help and bad flags
        return int(exc.code or 0), None, None

    start = time.perf_counter()
    try:
        report, code = _HANDLERS[args.command](args)
    except SchemaError as exc:
        return 2, {"error": str(exc), "exit": 2}, args
    except VilenkinError as exc:
        return 1, {"error": str(exc), "exit": 1}, args
    if getattr(args, "timing", False):
        report["timing"] = round(time.perf_counter() - start, 6)
    return code, report, args


def run_command(argv: list[str]) -> tuple[int, dict | None]:
    """Programmatic entry point: returns (exit code, report dict)."""
    code, report, _ = _run(argv)
    return code, report


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    code, report, args = _run(argv)
    if report is None:
        return code
    if "error" in report:
        sys.stderr.write(report["error"] + "\n")
        return code
    payload = emit_report(report, getattr(args, "format", "json"))
    output = getattr(args, "output", None)
    if output:
        with open(output, "wb") as handle:
            handle.write(payload)
    else:
        sys.stdout.buffer.write(payload)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
