"""Prefix-code construction over the block alphabet.

Codes are described by codeword lengths only.  A length of 0 marks a block
that gets no codeword (it has zero probability and never occurs).

Everything here is plain Python arithmetic, so distributions given as
:class:`fractions.Fraction` produce exact moments and exact penalties.
"""

from __future__ import annotations

import heapq
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Real
from pathlib import Path
from typing import Any, Sequence

from .errors import CodeDesignError, InfeasibleCodeError
from .source_model import (
    BlockDistribution,
    SourceDistribution,
    _total,
    block_distribution,
    enumerate_types,
    type_of,
)

HULL_TOL = 1e-12


@dataclass(frozen=True)
class CodeLengths:
    lengths: tuple[int, ...]
    blocklength: int
    alphabet_size: int

    def __post_init__(self) -> None:
        lengths = tuple(int(l) for l in self.lengths)
        object.__setattr__(self, "lengths", lengths)
        if any(l < 0 for l in lengths):
            raise ValueError("codeword lengths must be nonnegative")
        if len(lengths) != self.alphabet_size**self.blocklength:
            raise ValueError(
                f"expected {self.alphabet_size}**{self.blocklength} lengths, got {len(lengths)}"
            )

    def __len__(self) -> int:
        return len(self.lengths)

    def kraft_sum(self) -> Fraction:
        return sum((Fraction(1, 2**l) for l in self.lengths if l > 0), Fraction(0))

    @property
    def max_length(self) -> int:
        return max(self.lengths)

    def to_json(self) -> str:
        return json.dumps(
            {
                "blocklength": self.blocklength,
                "alphabet_size": self.alphabet_size,
                "lengths": list(self.lengths),
                "block_order": "lexicographic",
            }
        )

    @classmethod
    def from_json(cls, source: str | Path | dict[str, Any]) -> CodeLengths:
        if isinstance(source, dict):
            doc = source
        else:
            text = str(source)
            if not text.lstrip().startswith("{"):
                text = Path(text).read_text()
            doc = json.loads(text)
        try:
            B = doc["blocklength"]
            lengths = doc["lengths"]
        except (KeyError, TypeError):
            raise ValueError('codebook JSON needs "blocklength" and "lengths"') from None
        if doc.get("block_order", "lexicographic") != "lexicographic":
            raise ValueError(f"unsupported block_order {doc['block_order']!r}")
        if not isinstance(B, int) or B < 1:
            raise ValueError(f"blocklength must be a positive integer, got {B!r}")
        if not isinstance(lengths, list) or not all(
            isinstance(l, int) and not isinstance(l, bool) for l in lengths
        ):
            raise ValueError('"lengths" must be a list of integers')
        m = doc.get("alphabet_size")
        if m is None:
            m = round(len(lengths) ** (1.0 / B))
        return cls(tuple(lengths), B, m)


@dataclass(frozen=True)
class CodeStats:
    mean_len: Real
    second_moment: Real

    @property
    def variance(self) -> Real:
        return self.second_moment - self.mean_len**2


@dataclass(frozen=True)
class PenaltyWeights:
    """Weights of the linear penalty ``alpha*E[L] + beta*E[L^2]``."""

    alpha: Real
    beta: Real

    def __post_init__(self) -> None:
        if self.alpha < 0 or self.beta < 0:
            raise ValueError("penalty weights must be nonnegative")
        if self.alpha == 0 and self.beta == 0:
            raise ValueError("penalty weights cannot both be zero")

    def penalty(self, stats: CodeStats) -> Real:
        return self.alpha * stats.mean_len + self.beta * stats.second_moment


@dataclass(frozen=True)
class HullPoint:
    code: CodeLengths
    stats: CodeStats


def code_stats(code: CodeLengths, blockdist: BlockDistribution) -> CodeStats:
    if len(code) != len(blockdist):
        raise ValueError(f"code has {len(code)} lengths but distribution has {len(blockdist)} blocks")
    first, second = [], []
    for i, (p, l) in enumerate(zip(blockdist.probs, code.lengths)):
        if p > 0:
            if l == 0:
                raise ValueError(f"block {i} has positive probability but no codeword")
            first.append(p * l)
            second.append(p * l * l)
    return CodeStats(_total(first), _total(second))


def _from_support(blockdist: BlockDistribution, support: Sequence[int], lengths: Sequence[int]) -> CodeLengths:
    full = [0] * len(blockdist)
    for i, l in zip(support, lengths):
        full[i] = l
    return CodeLengths(tuple(full), blockdist.blocklength, blockdist.alphabet_size)


def huffman(blockdist: BlockDistribution) -> CodeLengths:
    """Minimum-redundancy codeword lengths (classic two-smallest merging)."""
    support = blockdist.support
    if len(support) < 2:
        raise CodeDesignError("Huffman coding needs at least 2 positive-probability blocks")
    depth = [0] * len(support)
    # (weight, creation order, leaf positions); creation order keeps ties deterministic
    heap = [(blockdist.probs[i], pos, [pos]) for pos, i in enumerate(support)]
    heapq.heapify(heap)
    counter = len(support)
    while len(heap) > 1:
        w1, _, leaves1 = heapq.heappop(heap)
        w2, _, leaves2 = heapq.heappop(heap)
        for pos in leaves1:
            depth[pos] += 1
        for pos in leaves2:
            depth[pos] += 1
        heapq.heappush(heap, (w1 + w2, counter, leaves1 + leaves2))
        counter += 1
    return _from_support(blockdist, support, depth)


def package_merge_linear(
    blockdist: BlockDistribution, weights: PenaltyWeights, l_max: int | None = None
) -> CodeLengths:
    """Lengths minimizing ``alpha*E[L] + beta*E[L^2]`` subject to Kraft and ``l <= l_max``.

    Coin-collector formulation: block ``i`` contributes one coin per level
    ``l = 1..l_max`` of width ``2**-l`` and cost ``p_i * (f(l) - f(l-1))``.
    The cheapest coin set of total width ``n - 1`` is found by package-merge,
    and block ``i`` gets as many bits as it has coins selected.  Costs grow
    with the level (``f`` is convex), and on equal cost a coin is preferred
    over a package, so every block's selected coins form a prefix of its
    levels and the resulting lengths meet Kraft with equality.
    """
    support = blockdist.support
    n = len(support)
    if n < 2:
        raise CodeDesignError("need at least 2 positive-probability blocks")
    if l_max is None:
        l_max = n - 1
    if l_max < 1 or n > 2**l_max:
        raise CodeDesignError(f"{n} codewords cannot satisfy Kraft with lengths <= {l_max}")
    probs = [blockdist.probs[i] for i in support]
    alpha, beta = weights.alpha, weights.beta

    # merged[l]: (cost, ref) sorted; ref >= 0 is a coin of block `ref`, ref < 0 a package
    merged: list[list[tuple]] = [[] for _ in range(l_max + 1)]
    below: list[tuple] = []
    for level in range(l_max, 0, -1):
        step = alpha + beta * (2 * level - 1)
        coins = sorted((p * step, pos) for pos, p in enumerate(probs))
        packages = [below[2 * j][0] + below[2 * j + 1][0] for j in range(len(below) // 2)]
        out = []
        i = j = 0
        while i < len(coins) or j < len(packages):
            if j == len(packages) or (i < len(coins) and coins[i][0] <= packages[j]):
                out.append(coins[i])
                i += 1
            else:
                out.append((packages[j], -1))
                j += 1
        merged[level] = out
        below = out

    lengths = [0] * n
    take = 2 * (n - 1)
    for level in range(1, l_max + 1):
        if take == 0:
            break
        n_packages = 0
        for _, ref in merged[level][:take]:
            if ref < 0:
                n_packages += 1
            else:
                lengths[ref] += 1
        take = 2 * n_packages
    return _from_support(blockdist, support, lengths)


def min_second_moment_code(blockdist: BlockDistribution, l_max: int | None = None) -> CodeLengths:
    return package_merge_linear(blockdist, PenaltyWeights(0, 1), l_max)


def _stats_close(a: CodeStats, b: CodeStats, tol: float) -> bool:
    return abs(a.mean_len - b.mean_len) <= tol and abs(a.second_moment - b.second_moment) <= tol


def hull_codebooks(
    blockdist: BlockDistribution, l_max: int | None = None, tol: float = HULL_TOL
) -> list[HullPoint]:
    """Codes on the lower-left boundary of the (E[L], E[L^2]) region.

    Starts from the minimum-E[L] and minimum-E[L^2] codes and, for each pair
    of neighbouring boundary codes, asks for the best code under the penalty
    whose level lines are parallel to the segment joining them.  A code
    strictly below the segment splits it in two; otherwise the segment is a
    hull edge.  Returned in order of increasing E[L].
    """

    def find_best(alpha, beta) -> HullPoint:
        code = package_merge_linear(blockdist, PenaltyWeights(alpha, beta), l_max)
        return HullPoint(code, code_stats(code, blockdist))

    left, right = find_best(1, 0), find_best(0, 1)
    found = [left, right]
    pending = [(left, right)]
    while pending:
        a, b = pending.pop()
        alpha = a.stats.second_moment - b.stats.second_moment
        beta = b.stats.mean_len - a.stats.mean_len
        if alpha < 0 or beta < 0 or (alpha == 0 and beta == 0):
            continue
        w = PenaltyWeights(alpha, beta)
        c = find_best(alpha, beta)
        if w.penalty(c.stats) < w.penalty(a.stats) - tol:
            found.append(c)
            pending.append((a, c))
            pending.append((c, b))

    found.sort(key=lambda h: (h.stats.mean_len, h.stats.second_moment))
    boundary: list[HullPoint] = []
    for h in found:
        if boundary and h.stats.second_moment >= boundary[-1].stats.second_moment - tol:
            continue  # duplicate or dominated by a point with smaller E[L]
        if boundary and abs(h.stats.mean_len - boundary[-1].stats.mean_len) <= tol:
            boundary[-1] = h
            continue
        boundary.append(h)
    return boundary


def age_penalty(stats: CodeStats, B: int, R: float) -> float:
    """D/G/1 upper bound on average age; ``inf`` when the buffer is unstable."""
    if R <= 0:
        raise ValueError(f"rate must be positive, got {R}")
    mean, second = float(stats.mean_len), float(stats.second_moment)
    capacity = B * R
    if mean >= capacity:
        return math.inf
    var = max(second - mean * mean, 0.0)
    return var / (2 * R * (capacity - mean)) + mean / R + B / 2


def select_age_optimal(hull: Sequence[HullPoint], B: int, R: float) -> tuple[HullPoint, float]:
    best, best_age = None, math.inf
    for h in sorted(hull, key=lambda h: h.stats.mean_len):
        age = age_penalty(h.stats, B, R)
        if age < best_age:
            best, best_age = h, age
    if best is None:
        min_mean = min(float(h.stats.mean_len) for h in hull)
        raise InfeasibleCodeError(min_mean, B * R)
    return best, best_age


def age_optimal_code(
    dist: SourceDistribution | BlockDistribution, B: int, R: float, l_max: int | None = None
) -> tuple[CodeLengths, float]:
    """Hull code with the smallest D/G/1 age bound at blocklength ``B`` and rate ``R``."""
    if isinstance(dist, BlockDistribution):
        if dist.blocklength != B:
            raise ValueError(f"block distribution has B={dist.blocklength}, requested B={B}")
        blockdist = dist
    else:
        blockdist = block_distribution(dist, B)
    best, age = select_age_optimal(hull_codebooks(blockdist, l_max), B, R)
    return best.code, age


def _ceil_log2(n: int) -> int:
    return (n - 1).bit_length()


def type_code(m: int, B: int) -> CodeLengths:
    """Two-part code: fixed-width type header, then the index within the type class."""
    types = enumerate_types(m, B)
    header = _ceil_log2(len(types))
    payload = {t.counts: _ceil_log2(t.class_size) for t in types}
    lengths = []
    for idx in range(m**B):
        digits = []
        for _ in range(B):
            idx, d = divmod(idx, m)
            digits.append(d)
        lengths.append(header + payload[type_of(digits, m)])
    return CodeLengths(tuple(lengths), B, m)


def example_prefix_code() -> CodeLengths:
    """Ternary source, B=2: block AA gets 1 bit, every other block 4 bits."""
    return CodeLengths((1,) + (4,) * 8, 2, 3)


def example_source(a: Real) -> SourceDistribution:
    """Ternary source with P(A) = a and the remainder split evenly over B, C."""
    rest = (1 - a) / 2
    return SourceDistribution((a, rest, rest))


__all__ = [
    "HULL_TOL",
    "CodeLengths",
    "CodeStats",
    "PenaltyWeights",
    "HullPoint",
    "code_stats",
    "huffman",
    "package_merge_linear",
    "min_second_moment_code",
    "hull_codebooks",
    "age_penalty",
    "select_age_optimal",
    "age_optimal_code",
    "type_code",
    "example_prefix_code",
    "example_source",
]
