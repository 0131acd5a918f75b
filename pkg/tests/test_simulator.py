import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from agecode.code_design import CodeLengths, age_penalty, code_stats, example_prefix_code, example_source, huffman
from agecode.queue_analysis import ChannelConfig, example_error_bound, example_model, example_stationary
from agecode.simulator import (
    deliveries,
    delivery_times,
    example_chain_sim,
    rate_fraction,
    run_age_sim,
    run_error_sim,
    warmup_count,
)
from agecode.source_model import SourceDistribution, block_distribution

from oracles import tick_by_tick

EXAMPLE_CFG = ChannelConfig(2, 1.5)


def example_blocks(q):
    return block_distribution(example_source(math.sqrt(q)), 2)


def test_single_block_hand_walk():
    assert delivery_times([4], 2, 1.5, "fluid")[0] == pytest.approx(14 / 3)
    assert delivery_times([4], 2, 1.5, "bitslot")[0] == pytest.approx(14 / 3)


def test_misaligned_ticks_hand_walk():
    # B = 1, ticks every 2/3: arrivals at 1, 2, 3 leave at the next tick strictly after
    assert delivery_times([1, 1, 1], 1, 1.5, "bitslot") == pytest.approx([4 / 3, 8 / 3, 10 / 3])
    assert delivery_times([1, 1, 1], 1, 1.5, "fluid") == pytest.approx([5 / 3, 8 / 3, 11 / 3])


@settings(max_examples=60, deadline=None)
@given(
    st.lists(st.integers(1, 7), min_size=1, max_size=40),
    st.integers(1, 4),
    st.sampled_from([Fraction(3, 2), Fraction(13, 5), Fraction(1), Fraction(7, 3), Fraction(4, 5)]),
)
def test_recursions_match_event_walk(lengths, B, R):
    for timing in ("fluid", "bitslot"):
        got = delivery_times(lengths, B, R, timing)
        want = [float(x) for x in tick_by_tick(lengths, B, R, timing)]
        assert got == pytest.approx(want, rel=1e-12)


@settings(max_examples=40, deadline=None)
@given(
    st.lists(st.integers(1, 7), min_size=2, max_size=60),
    st.integers(1, 4),
    st.sampled_from([1.5, 2.6, 1.0, 7 / 3, 0.8]),
)
def test_delivery_invariants(lengths, B, R):
    fluid = delivery_times(lengths, B, R, "fluid")
    slot = delivery_times(lengths, B, R, "bitslot")
    arrivals = B * np.arange(1, len(lengths) + 1)
    for D in (fluid, slot):
        assert np.all(D >= arrivals)
        assert np.all(np.diff(D) > 0)
    assert np.all(slot >= fluid - 1 / R - 1e-12)


def test_timings_agree_on_aligned_grid():
    rng = np.random.default_rng(0)
    lengths = rng.integers(1, 5, size=2000)
    assert np.array_equal(delivery_times(lengths, 2, 1.5, "fluid"), delivery_times(lengths, 2, 1.5, "bitslot"))
    assert np.array_equal(delivery_times(lengths, 3, 2, "fluid"), delivery_times(lengths, 3, 2, "bitslot"))


def test_rate_fraction():
    assert rate_fraction(2.6) == Fraction(13, 5)
    assert rate_fraction(1.5) == Fraction(3, 2)
    with pytest.raises(ValueError):
        rate_fraction(0)


def test_rejects_missing_codeword():
    with pytest.raises(ValueError):
        delivery_times([1, 0, 2], 1, 1.0)


def test_warmup_count():
    assert warmup_count(100_000) == 10_000
    assert warmup_count(500) == 100
    assert warmup_count(100) == 50


def test_deliveries_trace():
    bd = example_blocks(0.5)
    trace = deliveries(example_prefix_code(), bd, EXAMPLE_CFG, "fluid", 1000, 4)
    assert np.array_equal(trace.arrival, 2 * np.arange(1, 1001))
    assert set(np.unique(trace.lengths).tolist()) <= {1, 4}
    again = deliveries(example_prefix_code(), bd, EXAMPLE_CFG, "fluid", 1000, 4)
    assert np.array_equal(trace.delivery, again.delivery)


def sawtooth_oracle(delivery, B, warmup):
    """Area under the age curve from the warmup delivery to the last, by explicit walk."""
    area, prev_t, prev_age = 0.0, None, None
    for k, D in enumerate(delivery, start=1):
        if prev_t is not None and k > warmup:
            # age grows linearly from prev_age over [prev_t, D]
            area += (D - prev_t) * prev_age + (D - prev_t) ** 2 / 2
        prev_t, prev_age = D, D - k * B
    return area / (delivery[-1] - delivery[warmup - 1])


def test_sawtooth_integration_against_walk():
    bd = example_blocks(0.6)
    res = run_age_sim(example_prefix_code(), bd, EXAMPLE_CFG, "fluid", 3000, 9)
    trace = deliveries(example_prefix_code(), bd, EXAMPLE_CFG, "fluid", 3000, 9)
    # warmup blocks' own sawtooth pieces are excluded; the first kept piece starts at D_warmup
    expected = sawtooth_oracle(list(trace.delivery), 2, res.warmup_discarded)
    assert res.age_time_avg == pytest.approx(expected, rel=1e-12)
    sys_t = trace.delivery[res.warmup_discarded:] - trace.arrival[res.warmup_discarded:]
    assert res.age_via_system_time == pytest.approx(sys_t.mean() + 1.0)


@pytest.mark.parametrize("timing", ["fluid", "bitslot"])
@pytest.mark.parametrize("l, B, R", [(2, 1, 3.0), (4, 2, 2.6), (3, 3, 1.5)])
def test_deterministic_code_age(timing, l, B, R):
    m = 3
    code = CodeLengths((l,) * m**B, B, m)
    bd = block_distribution(SourceDistribution((0.6, 0.3, 0.1)), B)
    res = run_age_sim(code, bd, ChannelConfig(B, R), timing, 100_000, 1)
    expected = l / R + B / 2
    if timing == "fluid":
        assert res.age_time_avg == pytest.approx(expected, rel=5e-3)
        assert res.age_via_system_time == pytest.approx(expected, rel=5e-3)
    assert not res.unstable


def test_estimators_agree_and_bound_dominates():
    for q in (0.4, 0.5, 0.7):
        bd = example_blocks(q)
        res = run_age_sim(example_prefix_code(), bd, EXAMPLE_CFG, "fluid", 100_000, 2)
        tol = max(0.005 * res.age_via_system_time, 2 * res.age_std_error)
        assert abs(res.age_time_avg - res.age_via_system_time) <= tol
        bound = age_penalty(code_stats(example_prefix_code(), bd), 2, 1.5)
        assert res.age_time_avg <= bound + 2 * res.age_std_error
    res = run_age_sim(example_prefix_code(), example_blocks(0.5), EXAMPLE_CFG, "fluid", 100_000, 1)
    assert res.age_time_avg <= 4.1666667 * 1.01


def test_same_seed_identical_results():
    bd = example_blocks(0.5)
    a = run_age_sim(example_prefix_code(), bd, EXAMPLE_CFG, "bitslot", 20_000, 77)
    b = run_age_sim(example_prefix_code(), bd, EXAMPLE_CFG, "bitslot", 20_000, 77)
    assert a == b
    c = run_age_sim(example_prefix_code(), bd, EXAMPLE_CFG, "bitslot", 20_000, 78)
    assert c != a


def test_unstable_run_is_flagged():
    bd = example_blocks(0.2)
    res = run_age_sim(example_prefix_code(), bd, EXAMPLE_CFG, "fluid", 100_000, 1)
    assert res.unstable
    stable = run_age_sim(example_prefix_code(), example_blocks(0.8), EXAMPLE_CFG, "fluid", 100_000, 1)
    assert not stable.unstable


def test_error_sim_basic_shape():
    bd = example_blocks(0.5)
    est = run_error_sim(example_prefix_code(), bd, EXAMPLE_CFG, "bitslot", [0, 0.5, 1, 2, 3, 5, 8, 12], 50_000, 3)
    assert est[0].p_hat == 1.0
    assert est[0].trials == 2 * (50_000 - warmup_count(50_000))
    p = [e.p_hat for e in est]
    assert all(a >= b for a, b in zip(p, p[1:]))
    assert all(0 <= e.p_hat <= 1 for e in est)


@pytest.mark.parametrize("q", [0.4, 0.5, 0.7])
def test_error_sim_dominated_for_large_delay(q):
    # the exponential branch of the closed-form bound holds; see the acceptance suite for delta < 3
    est = run_error_sim(example_prefix_code(), example_blocks(q), EXAMPLE_CFG, "bitslot", range(3, 11), 100_000, 1)
    m = example_model(q)
    for e in est:
        assert e.p_hat <= example_error_bound(m, e.delta) + 3 * e.std_error


def exact_last_symbol_error(q, delta):
    """P(block undelivered delta after its last symbol) under the stationary buffer law.

    With b bits queued when the codeword arrives, its final bit leaves
    (b + L) ticks of 2/3 later, so the error event is b > 1.5*delta - L.
    """
    m = example_model(q)

    def tail(x):  # P(b > x)
        if x < 0:
            return 1.0
        return m.eta ** (math.floor(x) + 1)

    return q * tail(1.5 * delta - 1) + (1 - q) * tail(1.5 * delta - 4)


@pytest.mark.parametrize("q", [0.4, 0.5, 0.7])
def test_error_sim_matches_exact_chain_probability(q):
    # second symbol of each block has delay delta from its block's arrival; first has delta - 1
    est = run_error_sim(example_prefix_code(), example_blocks(q), EXAMPLE_CFG, "bitslot", range(1, 9), 200_000, 5)
    for e in est:
        expected = 0.5 * (exact_last_symbol_error(q, e.delta) + exact_last_symbol_error(q, e.delta - 1))
        assert e.p_hat == pytest.approx(expected, abs=4 * e.std_error + 1e-3)


def test_chain_sim_degenerate_and_normalised():
    occ = example_chain_sim(1.0, 10_000, 1)
    assert occ.freqs[0] == 1.0
    occ = example_chain_sim(0.5, 10**5, 2)
    assert occ.freqs.sum() == pytest.approx(1.0)
    with pytest.raises(ValueError):
        example_chain_sim(0.3, 10**4, 1)


def test_chain_sim_matches_stationary_law():
    m = example_model(0.5)
    occ = example_chain_sim(0.5, 10**6, 7)
    for j in range(21):
        assert abs(occ.freqs[j] - example_stationary(m, j)) <= 3 * occ.std_errors[j] + 1e-12
