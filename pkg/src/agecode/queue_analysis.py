"""Closed-form age and error bounds.

Two groups of results live here: the D/G/1 view of the encoder buffer
(deterministic block arrivals every ``B`` symbol times, service ``L/R``),
and the error-exponent view, including the worked ternary example with
code {AA -> 1 bit, others -> 4 bits} at ``B = 2``, ``R = 3/2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .code_design import CodeStats, age_penalty
from .errors import UnstableSourceError


@dataclass(frozen=True)
class ChannelConfig:
    B: int
    R: float

    def __post_init__(self) -> None:
        if self.B < 1:
            raise ValueError(f"blocklength must be >= 1, got {self.B}")
        if not self.R > 0:
            raise ValueError(f"rate must be positive, got {self.R}")

    @property
    def capacity(self) -> float:
        """Bits the buffer can drain per block interval."""
        return self.B * self.R


@dataclass(frozen=True)
class ErrorExponentModel:
    E_S: float
    K: float


@dataclass(frozen=True)
class ExampleModel:
    q: float
    eta: float
    K: float
    E_S: float


def stability(stats: CodeStats, cfg: ChannelConfig) -> bool:
    return float(stats.mean_len) < cfg.capacity


def kingman_wait_bound(stats: CodeStats, cfg: ChannelConfig) -> float:
    """Upper bound on mean waiting time from the first two service moments."""
    if not stability(stats, cfg):
        return math.inf
    mean = float(stats.mean_len)
    var = max(float(stats.second_moment) - mean * mean, 0.0)
    return var / (2 * cfg.R * (cfg.capacity - mean))


def age_upper_bound(stats: CodeStats, cfg: ChannelConfig) -> float:
    return age_penalty(stats, cfg.B, cfg.R)


def prop1_age_bound(model: ErrorExponentModel) -> float:
    """``K * 2^(2E) / (2^E - 1)^2``, the age bound implied by an error exponent."""
    if not model.E_S > 0:
        raise ValueError(f"error exponent must be positive, got {model.E_S}")
    if math.isinf(model.E_S):
        return model.K
    g = 2.0**-model.E_S
    return model.K / (1.0 - g) ** 2


def appendix_a_series(K: float, E_S: float, t_cap: int) -> float:
    """Partial sum over ``t <= t_cap`` of ``K * sum_{d >= t} 2^(-d E_S)``.

    Each inner tail is summed in closed form, so the only truncation is in
    ``t``; the sum tends to :func:`prop1_age_bound` as ``t_cap`` grows.
    """
    if not E_S > 0:
        raise ValueError(f"error exponent must be positive, got {E_S}")
    if t_cap < 0:
        raise ValueError("t_cap must be >= 0")
    g = 2.0**-E_S
    tail0 = 1.0 / (1.0 - g)
    return K * math.fsum(g**t * tail0 for t in range(t_cap + 1))


def example_model(q: float) -> ExampleModel:
    """Buffer-chain constants for the ternary example with ``P(AA) = q``."""
    if not 1 / 3 < q <= 1:
        raise UnstableSourceError(f"q = {q} gives no stationary buffer law; need 1/3 < q <= 1")
    if q == 1:
        return ExampleModel(q=1.0, eta=0.0, K=math.inf, E_S=math.inf)
    eta = (-1 + math.sqrt(1 + 4 * (1 - q) / q)) / 2
    K = eta**-4.5 * (1 - q * (1 - eta**3))
    E_S = -1.5 * math.log2(eta)
    return ExampleModel(q=q, eta=eta, K=K, E_S=E_S)


def example_stationary(model: ExampleModel, j: int) -> float:
    """Stationary probability of ``j`` bits left in the buffer, ``(1 - eta) eta^j``."""
    if j < 0:
        raise ValueError("buffer state must be >= 0")
    return (1 - model.eta) * model.eta**j


def example_error_bound(model: ExampleModel, delta: float) -> float:
    """Piecewise bound on the symbol error probability at decoding delay ``delta``.

    The three closed-form branches are evaluated as written, then clamped to [0, 1].
    """
    if delta < 0:
        raise ValueError(f"delay must be >= 0, got {delta}")
    if delta < 1:
        return 1.0
    q, eta = model.q, model.eta
    if eta == 0:
        # q = 1 limit; 0.0**0 == 1 keeps the delta = 1 and delta = 3 endpoints right
        if delta < 3:
            return min(1 - q + q * 0.0 ** (1.5 * (delta - 1)), 1.0)
        return (1 - q) * 0.0 ** (1.5 * (delta - 3))
    decay = 2.0 ** (delta * 1.5 * math.log2(eta))
    if delta < 3:
        value = 1 - q + eta**-1.5 * (q * (1 - eta)) * decay
    else:
        value = eta**-4.5 * (1 - q * (1 - eta**3)) * decay
    return min(max(value, 0.0), 1.0)


def example_age_bound(model: ExampleModel) -> float:
    """Age bound for the worked example obtained by summing its error bound."""
    q, eta = model.q, model.eta
    lead = 8 - 3 * q * (1 - eta**1.5 + eta**2.5 + 2 * eta / 3)
    if eta == 0:
        return lead
    K, s = model.K, 2.0**model.E_S
    return lead + 3 * K * s**-2 / (s - 1) + K * s**-1 / (s - 1) ** 2


__all__ = [
    "ChannelConfig",
    "ErrorExponentModel",
    "ExampleModel",
    "stability",
    "kingman_wait_bound",
    "age_upper_bound",
    "prop1_age_bound",
    "appendix_a_series",
    "example_model",
    "example_stationary",
    "example_error_bound",
    "example_age_bound",
]
