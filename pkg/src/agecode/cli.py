"""Command-line entry point: ``agecode {design,simulate,fig3,fig5a,fig5b}``."""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from typing import Sequence, TextIO

from . import experiments as ex
from .code_design import CodeLengths, code_stats
from .errors import BlockSizeError, CodeDesignError
from .queue_analysis import ChannelConfig
from .simulator import Timing, run_age_sim
from .source_model import SourceDistribution, block_distribution

EXIT_OK, EXIT_INPUT, EXIT_INFEASIBLE = 0, 1, 2

SIMULATE_COLUMNS = [
    "B",
    "R",
    "timing",
    "blocks",
    "seed",
    "age_time_avg",
    "age_via_system_time",
    "mean_system_time",
    "age_std_error",
    "warmup_discarded",
    "flag",
]


class InputError(Exception):
    pass


def format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return f"{value:.12g}"
    return str(value)


def write_csv(columns: Sequence[str], rows: Sequence[dict], out: TextIO) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(row[c]) for c in columns])


def _emit(columns, rows, path: str | None) -> None:
    if path is None:
        write_csv(columns, rows, sys.stdout)
    else:
        with open(path, "w", newline="") as fh:
            write_csv(columns, rows, fh)


def _load_dist(path: str | None) -> SourceDistribution:
    if path is None:
        return ex.DEFAULT_DIST
    try:
        return SourceDistribution.from_json(path)
    except (OSError, ValueError) as exc:
        raise InputError(f"bad distribution {path}: {exc}") from exc


def _float_list(text: str) -> list[float]:
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("grid must be nonempty")
    return values


def _int_list(text: str) -> list[int]:
    return [int(v) for v in _float_list(text)]


def cmd_design(args) -> int:
    dist = _load_dist(args.dist)
    report = ex.design_report(dist, args.B, args.R, args.l_max)
    print(f"B = {report.blocklength}, R = {report.rate:g}, B*R = {report.blocklength * report.rate:g} bits")
    print(f"{'scheme':<18} {'E[L]':>10} {'E[L^2]':>10} {'stable':>7} {'age bound':>11}  lengths")
    for s in report.schemes:
        if s.code is None:
            print(f"{s.name:<18} {'-':>10} {'-':>10} {'-':>7} {'inf':>11}  (no stable hull code)")
            continue
        lengths = ",".join(str(l) for l in s.code.lengths)
        print(
            f"{s.name:<18} {s.mean_len:>10.6g} {s.second_moment:>10.6g} {str(s.stable):>7} "
            f"{format_value(s.age_penalty):>11}  {lengths}"
        )
    print("hull points (E[L], E[L^2]):")
    for mean, second in report.hull:
        print(f"  {mean:.9g}  {second:.9g}")
    if args.out:
        doc = {
            "B": report.blocklength,
            "R": report.rate,
            "schemes": [
                {
                    "name": s.name,
                    "lengths": None if s.code is None else list(s.code.lengths),
                    "mean_len": s.mean_len,
                    "second_moment": s.second_moment,
                    "stable": s.stable,
                    "age_penalty": s.age_penalty if math.isfinite(s.age_penalty) else None,
                }
                for s in report.schemes
            ],
            "hull": report.hull,
        }
        with open(args.out, "w") as fh:
            json.dump(doc, fh, indent=2)
    best = report.age_optimal()
    if args.codebook_out and best.code is not None:
        with open(args.codebook_out, "w") as fh:
            fh.write(best.code.to_json())
    if report.infeasible is not None:
        print(f"error: {report.infeasible}", file=sys.stderr)
        return EXIT_INFEASIBLE
    return EXIT_OK


def cmd_simulate(args) -> int:
    try:
        code = CodeLengths.from_json(args.codebook)
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        raise InputError(f"bad codebook {args.codebook}: {exc}") from exc
    dist = _load_dist(args.dist)
    if dist.alphabet_size != code.alphabet_size:
        raise InputError(
            f"codebook alphabet size {code.alphabet_size} != distribution alphabet size {dist.alphabet_size}"
        )
    blockdist = block_distribution(dist, code.blocklength)
    try:
        stats = code_stats(code, blockdist)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    cfg = ChannelConfig(code.blocklength, args.R)
    result = run_age_sim(code, blockdist, cfg, args.timing, args.blocks, args.seed)
    unstable = result.unstable or float(stats.mean_len) >= cfg.capacity
    row = {
        "B": cfg.B,
        "R": args.R,
        "timing": Timing(args.timing).value,
        "blocks": result.blocks_simulated,
        "seed": args.seed,
        "age_time_avg": result.age_time_avg,
        "age_via_system_time": result.age_via_system_time,
        "mean_system_time": result.mean_system_time,
        "age_std_error": result.age_std_error,
        "warmup_discarded": result.warmup_discarded,
        "flag": "unstable" if unstable else "",
    }
    _emit(SIMULATE_COLUMNS, [row], args.out)
    return EXIT_OK


def cmd_fig3(args) -> int:
    columns, rows = ex.fig3_rows(args.a_grid, args.blocks, args.seed)
    _emit(columns, rows, args.out)
    return EXIT_OK


def cmd_fig5a(args) -> int:
    dist = _load_dist(args.dist)
    columns, rows = ex.fig5a_rows(dist, args.r_grid, args.blocklengths, args.blocks, args.seed, args.timing)
    _emit(columns, rows, args.out)
    return EXIT_OK


def cmd_fig5b(args) -> int:
    dist = _load_dist(args.dist)
    columns, rows = ex.fig5b_rows(dist, args.r_grid, args.B, args.blocks, args.seed, args.timing)
    _emit(columns, rows, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="agecode", description="Age-aware lossless block coding toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, timing_default="fluid", dist=True):
        if dist:
            p.add_argument("--dist", help='JSON file {"probs": [...]} (default: 0.6, 0.3, 0.1)')
        p.add_argument("--out", help="output file (default: stdout)")
        p.add_argument("--seed", type=int, default=ex.DEFAULT_SEED)
        p.add_argument("--blocks", type=int, default=ex.DEFAULT_BLOCKS)
        p.add_argument("--timing", choices=[t.value for t in Timing], default=timing_default)

    p = sub.add_parser("design", help="build and compare codes at one (B, R)")
    p.add_argument("--dist")
    p.add_argument("-B", "--blocklength", dest="B", type=int, required=True)
    p.add_argument("-R", "--rate", dest="R", type=float, required=True)
    p.add_argument("--l-max", type=int, default=None)
    p.add_argument("--out", help="write the report as JSON")
    p.add_argument("--codebook-out", help="write the age-optimal codebook JSON")
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("simulate", help="simulate one codebook")
    common(p)
    p.add_argument("--codebook", required=True)
    p.add_argument("-R", "--rate", dest="R", type=float, required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("fig3", help="example code at B=2, R=3/2 over a grid of P(A)")
    common(p, dist=False)
    p.add_argument("--a-grid", type=_float_list, default=None)
    p.set_defaults(func=cmd_fig3)

    p = sub.add_parser("fig5a", help="age-optimal code across rates and blocklengths")
    common(p)
    p.add_argument("--r-grid", type=_float_list, default=None)
    p.add_argument("--blocklengths", type=_int_list, default=list(ex.FIG5_BLOCKLENGTHS))
    p.set_defaults(func=cmd_fig5a)

    p = sub.add_parser("fig5b", help="age-optimal vs Huffman vs type code at one blocklength")
    common(p)
    p.add_argument("--r-grid", type=_float_list, default=None)
    p.add_argument("-B", "--blocklength", dest="B", type=int, default=ex.FIG5B_BLOCKLENGTH)
    p.set_defaults(func=cmd_fig5b)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (BlockSizeError, CodeDesignError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
