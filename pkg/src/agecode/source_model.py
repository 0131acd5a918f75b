"""I.i.d. discrete memoryless sources, block extensions and type classes."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Real
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .errors import BlockSizeError

DEFAULT_MAX_BLOCKS = 10**6


def _total(values: Sequence[Real]) -> Real:
    # exact for Fractions, correctly rounded for floats
    if all(isinstance(v, (int, Fraction)) for v in values):
        return sum(values, Fraction(0))
    return math.fsum(values)


@dataclass(frozen=True)
class SourceDistribution:
    """Symbol probabilities of a finite-alphabet i.i.d. source.

    Entries may be floats or :class:`fractions.Fraction`; fractions are kept
    exact all the way through code design.
    """

    probs: tuple

    def __post_init__(self) -> None:
        probs = tuple(self.probs)
        object.__setattr__(self, "probs", probs)
        if len(probs) < 2:
            raise ValueError(f"alphabet needs at least 2 symbols, got {len(probs)}")
        for i, p in enumerate(probs):
            if isinstance(p, bool) or not isinstance(p, Real):
                raise ValueError(f"probs[{i}] = {p!r} is not a number")
            if not math.isfinite(p):
                raise ValueError(f"probs[{i}] = {p!r} is not finite")
            if p < 0:
                raise ValueError(f"probs[{i}] = {p!r} is negative")
        total = _total(probs)
        if abs(total - 1) > 1e-12:
            raise ValueError(f"probs sum to {float(total)!r}, expected 1")

    @property
    def alphabet_size(self) -> int:
        return len(self.probs)

    @classmethod
    def from_json(cls, source: str | Path | dict[str, Any]) -> SourceDistribution:
        """Load ``{"probs": [...]}`` from a path, a JSON string or a parsed dict."""
        if isinstance(source, dict):
            doc = source
        else:
            text = str(source)
            path = Path(text)
            if not text.lstrip().startswith("{"):
                text = path.read_text()
            doc = json.loads(text)
        if not isinstance(doc, dict) or "probs" not in doc:
            raise ValueError('distribution JSON must be an object with a "probs" list')
        if not isinstance(doc["probs"], list):
            raise ValueError('"probs" must be a list')
        return cls(tuple(doc["probs"]))

    def to_json(self) -> str:
        return json.dumps({"probs": [float(p) for p in self.probs]})


@dataclass(frozen=True)
class BlockDistribution:
    """Product distribution over length-``blocklength`` symbol strings.

    Block index ``i`` is the base-``alphabet_size`` number whose digits,
    most significant first, are the symbols of the block.
    """

    blocklength: int
    alphabet_size: int
    probs: tuple

    def __len__(self) -> int:
        return len(self.probs)

    def symbols(self, index: int) -> tuple[int, ...]:
        digits = []
        for _ in range(self.blocklength):
            index, d = divmod(index, self.alphabet_size)
            digits.append(d)
        return tuple(reversed(digits))

    def index(self, symbols: Sequence[int]) -> int:
        idx = 0
        for s in symbols:
            idx = idx * self.alphabet_size + s
        return idx

    @property
    def support(self) -> list[int]:
        """Indices of blocks with positive probability."""
        return [i for i, p in enumerate(self.probs) if p > 0]

    def as_array(self) -> np.ndarray:
        return np.asarray([float(p) for p in self.probs], dtype=float)


def entropy(dist: SourceDistribution | BlockDistribution) -> float:
    """Shannon entropy in bits, with 0 log 0 = 0."""
    return -math.fsum(float(p) * math.log2(p) for p in dist.probs if p > 0)


def block_distribution(
    dist: SourceDistribution, B: int, max_entries: int = DEFAULT_MAX_BLOCKS
) -> BlockDistribution:
    if B < 1:
        raise ValueError(f"blocklength must be >= 1, got {B}")
    m = dist.alphabet_size
    if m**B > max_entries:
        raise BlockSizeError(f"{m}**{B} = {m**B} blocks exceeds the cap of {max_entries}")
    probs: list = [1]
    for _ in range(B):
        probs = [p * s for p in probs for s in dist.probs]
    return BlockDistribution(B, m, tuple(probs))


@dataclass(frozen=True)
class TypeClass:
    counts: tuple[int, ...]
    class_size: int


def _multinomial(counts: Sequence[int]) -> int:
    size, remaining = 1, sum(counts)
    for c in counts:
        size *= math.comb(remaining, c)
        remaining -= c
    return size


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for tail in _compositions(total - head, parts - 1):
            yield (head,) + tail


def enumerate_types(m: int, B: int) -> list[TypeClass]:
    """All compositions of ``B`` into ``m`` parts, in ascending lexicographic order."""
    if m < 2 or B < 1:
        raise ValueError(f"need m >= 2 and B >= 1, got m={m}, B={B}")
    return [TypeClass(c, _multinomial(c)) for c in _compositions(B, m)]


def type_of(symbols: Sequence[int], m: int) -> tuple[int, ...]:
    counts = [0] * m
    for s in symbols:
        counts[s] += 1
    return tuple(counts)


def sample_block(blockdist: BlockDistribution, rng: np.random.Generator) -> int:
    return int(sample_blocks(blockdist, 1, rng)[0])


def sample_blocks(blockdist: BlockDistribution, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``n`` i.i.d. block indices by inverse-CDF lookup."""
    cdf = np.cumsum(blockdist.as_array())
    cdf /= cdf[-1]
    idx = np.searchsorted(cdf, rng.random(n), side="right")
    return np.minimum(idx, len(cdf) - 1)


__all__ = [
    "DEFAULT_MAX_BLOCKS",
    "SourceDistribution",
    "BlockDistribution",
    "TypeClass",
    "entropy",
    "block_distribution",
    "enumerate_types",
    "type_of",
    "sample_block",
    "sample_blocks",
]
