"""Discrete-event simulation of encoder -> FIFO bit buffer -> decoder.

Block ``k`` (1-based) enters the buffer at time ``k*B``.  Two service
models are offered:

* ``fluid``: the block's ``L_k`` bits take exactly ``L_k / R`` time, so
  ``D_k = max(k*B, D_{k-1}) + L_k / R`` (a D/G/1 queue).
* ``bitslot``: the channel sends one bit at each tick ``i / R``.  A bit
  leaves at the first tick strictly after it was enqueued and strictly after
  the previous bit's tick.

The rate is handled as an exact fraction ``p/u`` so both recursions run in
integer units of ``1/p`` and agree exactly whenever the grids align.
Everything downstream of the sampled lengths is a vectorised Lindley
recursion (running maximum of arrival minus cumulative work).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .code_design import CodeLengths, code_stats
from .queue_analysis import ChannelConfig
from .source_model import BlockDistribution, sample_blocks

MIN_WARMUP = 100
N_BATCHES = 32


class Timing(str, enum.Enum):
    FLUID = "fluid"
    BITSLOT = "bitslot"


@dataclass(frozen=True)
class DeliveryTrace:
    index: np.ndarray  # k = 1..n
    arrival: np.ndarray  # k*B
    delivery: np.ndarray  # D_k
    lengths: np.ndarray  # L_k


@dataclass(frozen=True)
class SimResult:
    age_time_avg: float
    age_via_system_time: float
    mean_system_time: float
    age_std_error: float
    blocks_simulated: int
    warmup_discarded: int
    unstable: bool


@dataclass(frozen=True)
class ErrorEstimate:
    delta: float
    p_hat: float
    trials: int
    std_error: float


@dataclass(frozen=True)
class ChainOccupancy:
    freqs: np.ndarray
    std_errors: np.ndarray
    steps: int


def rate_fraction(R: float | Fraction, max_denominator: int = 10**6) -> Fraction:
    """Rate as a fraction; floats are snapped to the nearest small-denominator ratio."""
    frac = Fraction(R).limit_denominator(max_denominator)
    if frac <= 0:
        raise ValueError(f"rate must be positive, got {R}")
    return frac


def warmup_count(n_blocks: int) -> int:
    return min(max(n_blocks // 10, MIN_WARMUP), n_blocks // 2)


def batch_std_error(samples: np.ndarray, n_batches: int = N_BATCHES) -> float:
    """Standard error of the mean by non-overlapping batch means."""
    n = len(samples) // n_batches
    if n < 1:
        return math.nan
    means = samples[: n * n_batches].reshape(n_batches, n).mean(axis=1)
    return float(means.std(ddof=1) / math.sqrt(n_batches))


def delivery_times(
    lengths: Sequence[int] | np.ndarray, B: int, R: float | Fraction, timing: Timing | str = Timing.FLUID
) -> np.ndarray:
    """Delivery time ``D_k`` of each block given its codeword length ``L_k``."""
    timing = Timing(timing)
    L = np.asarray(lengths, dtype=np.int64)
    if len(L) == 0:
        return np.zeros(0)
    if np.any(L < 1):
        raise ValueError("every transmitted block needs a codeword of length >= 1")
    rate = rate_fraction(R)
    p, u = rate.numerator, rate.denominator
    k = np.arange(1, len(L) + 1, dtype=np.int64)
    cum = np.cumsum(L)
    cum_before = cum - L
    if timing is Timing.FLUID:
        # time measured in units of 1/p; a bit takes u units
        start = k * B * p
        done = u * cum + np.maximum.accumulate(start - u * cum_before)
        return done / p
    # tick index of the first tick strictly after the block's arrival
    first_tick = (k * B * p) // u + 1
    next_free = cum + np.maximum.accumulate(first_tick - cum_before)
    return (next_free - 1) * u / p


def deliveries(
    code: CodeLengths,
    blockdist: BlockDistribution,
    cfg: ChannelConfig,
    timing: Timing | str = Timing.FLUID,
    n_blocks: int = 100_000,
    seed: int = 1,
) -> DeliveryTrace:
    if len(code) != len(blockdist):
        raise ValueError("code and block distribution index different alphabets")
    rng = np.random.default_rng(seed)
    blocks = sample_blocks(blockdist, n_blocks, rng)
    table = np.asarray(code.lengths, dtype=np.int64)
    L = table[blocks]
    k = np.arange(1, n_blocks + 1)
    return DeliveryTrace(k, k * cfg.B, delivery_times(L, cfg.B, cfg.R, timing), L)


def _age_from_trace(trace: DeliveryTrace, B: int, warmup: int) -> tuple[float, float, float, float]:
    D = np.concatenate(([float(B)], trace.delivery))
    gen = np.concatenate(([0.0], trace.arrival.astype(float)))
    # sawtooth piece on (D_{k-1}, D_k]: starts at D_{k-1} - (k-1)B, slope 1
    dt = np.diff(D)
    start_age = D[:-1] - gen[:-1]
    area = dt * start_age + 0.5 * dt * dt
    window = slice(warmup, None)
    time_avg = float(area[window].sum() / (D[-1] - D[warmup]))
    system = trace.delivery[window] - trace.arrival[window]
    mean_t = float(system.mean())
    return time_avg, mean_t + B / 2, mean_t, batch_std_error(system)


def run_age_sim(
    code: CodeLengths,
    blockdist: BlockDistribution,
    cfg: ChannelConfig,
    timing: Timing | str = Timing.FLUID,
    n_blocks: int = 100_000,
    seed: int = 1,
) -> SimResult:
    """Average age by sawtooth integration and by mean system time.

    Runs whose final backlog exceeds ``10 * E[L] * sqrt(n_blocks)`` bits are
    flagged ``unstable``; the numbers are still returned.
    """
    if n_blocks < 100:
        raise ValueError("n_blocks must be >= 100")
    trace = deliveries(code, blockdist, cfg, timing, n_blocks, seed)
    warmup = warmup_count(n_blocks)
    time_avg, via_system, mean_t, se = _age_from_trace(trace, cfg.B, warmup)
    backlog = cfg.R * (trace.delivery[-1] - trace.arrival[-1])
    mean_len = float(code_stats(code, blockdist).mean_len)
    unstable = bool(backlog > 10 * mean_len * math.sqrt(n_blocks))
    return SimResult(time_avg, via_system, mean_t, se, n_blocks, warmup, unstable)


def run_error_sim(
    code: CodeLengths,
    blockdist: BlockDistribution,
    cfg: ChannelConfig,
    timing: Timing | str = Timing.BITSLOT,
    delta_list: Sequence[float] = tuple(range(11)),
    n_blocks: int = 100_000,
    seed: int = 1,
) -> list[ErrorEstimate]:
    """Empirical probability that a symbol is still undecoded ``delta`` after it arrived.

    Symbol ``i`` lives in block ``ceil(i/B)`` and counts as an error at
    observation time ``n = i + delta`` when that block's delivery time
    exceeds ``n``.  Decoding is in order, so this is also the probability
    that the whole prefix up to ``i`` is not yet reconstructed.
    """
    trace = deliveries(code, blockdist, cfg, timing, n_blocks, seed)
    warmup = warmup_count(n_blocks)
    D = trace.delivery[warmup:]
    k = trace.index[warmup:]
    # symbol positions r = 1..B inside each block: i = (k-1)B + r
    offsets = (k - 1)[:, None] * cfg.B + np.arange(1, cfg.B + 1)[None, :]
    slack = (D[:, None] - offsets).ravel()
    out = []
    for delta in delta_list:
        errors = (slack > delta).astype(float)
        out.append(ErrorEstimate(float(delta), float(errors.mean()), len(errors), batch_std_error(errors)))
    return out


def example_chain_sim(q: float, steps: int = 10**6, seed: int = 1, max_state: int | None = None) -> ChainOccupancy:
    """Occupancy of the buffer chain ``b' = max(b + L - 3, 0)``, ``L = 1`` w.p. ``q`` else 4."""
    if not 1 / 3 < q <= 1:
        raise ValueError(f"q must lie in (1/3, 1], got {q}")
    rng = np.random.default_rng(seed)
    step = np.where(rng.random(steps) < q, -2, 1)
    walk = np.cumsum(step)
    states = walk - np.minimum(np.minimum.accumulate(walk), 0)
    top = int(states.max()) if max_state is None else max_state
    counts = np.bincount(np.minimum(states, top), minlength=top + 1)
    freqs = counts / steps
    n = steps // N_BATCHES
    clipped = np.minimum(states[: n * N_BATCHES], top).reshape(N_BATCHES, n)
    per_batch = np.stack([np.bincount(row, minlength=top + 1) / n for row in clipped])
    std_errors = per_batch.std(axis=0, ddof=1) / math.sqrt(N_BATCHES)
    return ChainOccupancy(freqs, std_errors, steps)


__all__ = [
    "Timing",
    "DeliveryTrace",
    "SimResult",
    "ErrorEstimate",
    "ChainOccupancy",
    "rate_fraction",
    "warmup_count",
    "batch_std_error",
    "delivery_times",
    "deliveries",
    "run_age_sim",
    "run_error_sim",
    "example_chain_sim",
]
