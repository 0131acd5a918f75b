"""Dataset builders behind the ``design``, ``fig3``, ``fig5a`` and ``fig5b`` commands.

Each builder returns ``(columns, rows)`` where rows are dicts keyed by
column name, in deterministic grid order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .code_design import (
    CodeLengths,
    age_penalty,
    code_stats,
    example_prefix_code,
    example_source,
    huffman,
    hull_codebooks,
    min_second_moment_code,
    select_age_optimal,
    type_code,
)
from .errors import InfeasibleCodeError
from .queue_analysis import ChannelConfig, example_age_bound, example_model
from .simulator import Timing, run_age_sim
from .source_model import SourceDistribution, block_distribution, entropy

DEFAULT_DIST = SourceDistribution((0.6, 0.3, 0.1))
DEFAULT_BLOCKS = 100_000
DEFAULT_SEED = 1
FIG3_RATE = 1.5
FIG5_BLOCKLENGTHS = (1, 2, 3, 4)
FIG5B_BLOCKLENGTH = 3


def fig3_default_grid() -> list[float]:
    return [round(0.60 + 0.02 * i, 2) for i in range(20)]


def fig5_default_grid(dist: SourceDistribution = DEFAULT_DIST, step: float = 0.05, top: float = 3.0) -> list[float]:
    """Rates from the first grid step at or above 1.05*H(X) up to ``top``."""
    start = math.ceil(round(1.05 * entropy(dist) / step, 9)) * step
    n = int(round((top - start) / step))
    return [round(start + step * i, 10) for i in range(n + 1)]


@dataclass
class SchemeRow:
    name: str
    code: CodeLengths | None
    mean_len: float = math.nan
    second_moment: float = math.nan
    stable: bool = False
    age_penalty: float = math.inf


@dataclass
class DesignReport:
    blocklength: int
    rate: float
    schemes: list[SchemeRow]
    hull: list[tuple[float, float]] = field(default_factory=list)
    infeasible: InfeasibleCodeError | None = None

    def age_optimal(self) -> SchemeRow:
        return next(s for s in self.schemes if s.name == "age-optimal")


def design_report(dist: SourceDistribution, B: int, R: float, l_max: int | None = None) -> DesignReport:
    blockdist = block_distribution(dist, B)
    hull = hull_codebooks(blockdist, l_max)
    codes: dict[str, CodeLengths | None] = {
        "huffman": huffman(blockdist),
        "min-second-moment": min_second_moment_code(blockdist, l_max),
    }
    infeasible = None
    try:
        codes["age-optimal"] = select_age_optimal(hull, B, R)[0].code
    except InfeasibleCodeError as exc:
        codes["age-optimal"] = None
        infeasible = exc
    codes["type"] = type_code(dist.alphabet_size, B)

    rows = []
    for name, code in codes.items():
        row = SchemeRow(name, code)
        if code is not None:
            stats = code_stats(code, blockdist)
            row.mean_len = float(stats.mean_len)
            row.second_moment = float(stats.second_moment)
            row.stable = row.mean_len < B * R
            row.age_penalty = age_penalty(stats, B, R)
        rows.append(row)
    points = [(float(h.stats.mean_len), float(h.stats.second_moment)) for h in hull]
    return DesignReport(B, R, rows, points, infeasible)


FIG3_COLUMNS = [
    "a",
    "q",
    "H_X",
    "sim_age_fluid",
    "sim_age_bitslot",
    "dg1_bound",
    "ee_bound",
    "sim_age_fluid_se",
    "flag",
]


def fig3_rows(
    a_grid: Sequence[float] | None = None, n_blocks: int = DEFAULT_BLOCKS, seed: int = DEFAULT_SEED
) -> tuple[list[str], list[dict]]:
    """Fixed example code at B=2, R=3/2 swept over P(A) = a."""
    code = example_prefix_code()
    cfg = ChannelConfig(2, FIG3_RATE)
    rows = []
    for a in a_grid if a_grid is not None else fig3_default_grid():
        dist = example_source(a)
        blockdist = block_distribution(dist, 2)
        q = a * a
        row = {"a": a, "q": q, "H_X": entropy(dist)}
        stats = code_stats(code, blockdist)
        if q <= 1 / 3 or float(stats.mean_len) >= cfg.capacity:
            inf = math.inf
            row.update(sim_age_fluid=inf, sim_age_bitslot=inf, dg1_bound=inf, ee_bound=inf,
                       sim_age_fluid_se=inf, flag="unstable")
        else:
            fluid = run_age_sim(code, blockdist, cfg, Timing.FLUID, n_blocks, seed)
            bitslot = run_age_sim(code, blockdist, cfg, Timing.BITSLOT, n_blocks, seed)
            row.update(
                sim_age_fluid=fluid.age_time_avg,
                sim_age_bitslot=bitslot.age_time_avg,
                dg1_bound=age_penalty(stats, cfg.B, cfg.R),
                ee_bound=example_age_bound(example_model(q)),
                sim_age_fluid_se=fluid.age_std_error,
                flag="unstable" if fluid.unstable else "",
            )
        rows.append(row)
    return FIG3_COLUMNS, rows


FIG5A_COLUMNS = ["R", "B", "age_optimal_penalty", "sim_age", "valid", "mean_len", "sim_age_se"]


def fig5a_rows(
    dist: SourceDistribution = DEFAULT_DIST,
    r_grid: Sequence[float] | None = None,
    blocklengths: Sequence[int] = FIG5_BLOCKLENGTHS,
    n_blocks: int = DEFAULT_BLOCKS,
    seed: int = DEFAULT_SEED,
    timing: Timing | str = Timing.FLUID,
) -> tuple[list[str], list[dict]]:
    """Age-optimal code per (R, B); ``valid`` marks a stable blocklength."""
    hulls = {}
    for B in blocklengths:
        blockdist = block_distribution(dist, B)
        hulls[B] = (blockdist, hull_codebooks(blockdist))
    rows = []
    for R in r_grid if r_grid is not None else fig5_default_grid(dist):
        for B in blocklengths:
            blockdist, hull = hulls[B]
            row = {"R": R, "B": B}
            try:
                point, penalty = select_age_optimal(hull, B, R)
            except InfeasibleCodeError:
                row.update(age_optimal_penalty=math.inf, sim_age=math.inf, valid=False,
                           mean_len=float(hull[0].stats.mean_len), sim_age_se=math.inf)
            else:
                sim = run_age_sim(point.code, blockdist, ChannelConfig(B, R), timing, n_blocks, seed)
                row.update(age_optimal_penalty=penalty, sim_age=sim.age_time_avg, valid=True,
                           mean_len=float(point.stats.mean_len), sim_age_se=sim.age_std_error)
            rows.append(row)
    return FIG5A_COLUMNS, rows


FIG5B_COLUMNS = [
    "R",
    "sim_age_age_optimal",
    "sim_age_huffman",
    "sim_age_type",
    "penalty_age_optimal",
    "penalty_huffman",
    "penalty_type",
    "se_age_optimal",
    "se_huffman",
    "se_type",
]


def fig5b_rows(
    dist: SourceDistribution = DEFAULT_DIST,
    r_grid: Sequence[float] | None = None,
    B: int = FIG5B_BLOCKLENGTH,
    n_blocks: int = DEFAULT_BLOCKS,
    seed: int = DEFAULT_SEED,
    timing: Timing | str = Timing.FLUID,
) -> tuple[list[str], list[dict]]:
    """Age-optimal vs Huffman vs type code at a fixed blocklength.

    All three codes see the same block sequence at each rate (same seed).
    """
    blockdist = block_distribution(dist, B)
    hull = hull_codebooks(blockdist)
    fixed = {"huffman": huffman(blockdist), "type": type_code(dist.alphabet_size, B)}
    rows = []
    for R in r_grid if r_grid is not None else fig5_default_grid(dist):
        cfg = ChannelConfig(B, R)
        codes = dict(fixed)
        try:
            codes["age_optimal"] = select_age_optimal(hull, B, R)[0].code
        except InfeasibleCodeError:
            codes["age_optimal"] = None
        row: dict = {"R": R}
        for name in ("age_optimal", "huffman", "type"):
            code = codes[name]
            penalty = math.inf if code is None else age_penalty(code_stats(code, blockdist), B, R)
            row[f"penalty_{name}"] = penalty
            if math.isinf(penalty):
                row[f"sim_age_{name}"] = row[f"se_{name}"] = math.inf
            else:
                sim = run_age_sim(code, blockdist, cfg, timing, n_blocks, seed)
                row[f"sim_age_{name}"] = sim.age_time_avg
                row[f"se_{name}"] = sim.age_std_error
        rows.append(row)
    return FIG5B_COLUMNS, rows
