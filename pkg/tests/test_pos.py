import json

import pytest
from hypothesis import given, settings, strategies as st

from ledgerforge.pos import (
    StakeTable,
    ValidationRound,
    ZeroStake,
    draw_counts,
    label_address,
    load_stakes,
    named_stakes,
    run_round,
    seed_from_int,
    select_validator,
    settle_round,
)

SEED = seed_from_int(0)
B_GOLDEN = 75142  # B's wins in rounds 0..99,999 for stakes {A:1, B:3}, seed 0


def test_single_staker_always_selected():
    t = StakeTable({label_address("solo"): 7})
    for r in range(200):
        assert select_validator(t, seed_from_int(r), r) == label_address("solo")


def test_zero_stake_never_selected():
    t, names = named_stakes({"A": 5, "B": 0})
    counts = draw_counts(t, SEED, 5000)
    assert counts[names["A"]] == 5000 and counts[names["B"]] == 0


def test_zero_total_rejected():
    t, _ = named_stakes({"A": 0, "B": 0})
    with pytest.raises(ZeroStake):
        select_validator(t, SEED, 0)
    with pytest.raises(ValueError):
        select_validator(StakeTable({label_address("x"): 1}), b"short", 0)
    with pytest.raises(ValueError):
        StakeTable({label_address("x"): -1})


def test_golden_count_for_reference_seed():
    t, names = named_stakes({"A": 1, "B": 3})
    counts = draw_counts(t, SEED, 100_000)
    assert counts[names["B"]] == B_GOLDEN
    assert abs(counts[names["B"]] - 75_000) <= 1_000


def test_proportionality_for_ten_validators():
    stakes = {f"v{i}": i + 1 for i in range(10)}
    t, names = named_stakes(stakes)
    counts = draw_counts(t, seed_from_int(11), 100_000)
    for label, stake in stakes.items():
        assert abs(counts[names[label]] / 100_000 - stake / t.total) <= 0.015


@pytest.mark.parametrize("factor", [2, 10])
def test_scaling_keeps_frequencies(factor):
    base, names = named_stakes({"A": 1, "B": 3, "C": 6})
    scaled, _ = named_stakes({"A": factor, "B": 3 * factor, "C": 6 * factor})
    a = draw_counts(base, SEED, 20_000)
    b = draw_counts(scaled, SEED, 20_000)
    for addr in names.values():
        assert abs(a[addr] - b[addr]) / 20_000 <= 0.015


@settings(max_examples=40)
@given(st.dictionaries(st.text(min_size=1, max_size=4), st.integers(0, 50), min_size=1, max_size=10), st.integers(0, 10**6))
def test_selection_deterministic_and_positive(stakes, rnd):
    t, _ = named_stakes(stakes)
    if t.total == 0:
        return
    a = select_validator(t, SEED, rnd)
    assert a == select_validator(t, SEED, rnd)
    assert t[a] > 0


def test_settle_credits_fees():
    t, names = named_stakes({"A": 1, "B": 3})
    rnd = ValidationRound(0, SEED, names["B"])
    after = settle_round(t, rnd, 10)
    assert after[names["B"]] == 13 and after[names["A"]] == 1
    assert settle_round(t, rnd, 0) == t
    assert t[names["B"]] == 3
    with pytest.raises(ValueError):
        settle_round(t, rnd, -1)


def test_fee_loop_grows_total_by_fees_only():
    t, _ = named_stakes({"A": 1, "B": 3})
    start = t.total
    for r in range(1000):
        t = settle_round(t, run_round(t, SEED, r), 2)
    assert t.total == start + 1000 * 2


def test_json_round_trip(tmp_path):
    t, _ = named_stakes({"A": 1, "B": 3})
    p = tmp_path / "stakes.json"
    p.write_text(json.dumps(t.to_json()))
    assert load_stakes(p) == t
    assert list(t.entries) == sorted(t.entries)
