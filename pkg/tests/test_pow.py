import hashlib
import random

import pytest

from ledgerforge.crypto import ZERO_HASH, DifficultyTarget, double_sha256, sha256
from ledgerforge.ledger import GENESIS, BlockHeader, Chain, append_block, coinbase
from ledgerforge.pow import (
    PUZZLE_PREFIX,
    SearchLimitExceeded,
    bench,
    bench_csv,
    bench_markdown,
    mine_block,
    mine_string,
    retarget,
    verify_pow,
)

SIX_ZERO_HASH = "000000ca1415e0bec568f6f605fcc83d18cac7a4e6c219a957c10c6879d67587"
SEVEN_ZERO_HASH = "0000000e2ae7e4240df80692b7e586ea7a977eacbd031819d0e603257edb3a81"
EIGHT_ZERO_HASH = "0000000041095df5b11e4775bac1a087d3eaeffc15ff0bb7b5c3ddaecb4beb64"


def _oracle_nonce(prefix: str, k: int) -> int:
    n = 0
    while not hashlib.sha256(f"{prefix}{n}".encode()).hexdigest().startswith("0" * k):
        n += 1
    return n


def test_six_zero_nonce():
    sol = mine_string(PUZZLE_PREFIX, 6)
    assert sol.nonce == 10730895
    assert sol.hash.hex() == SIX_ZERO_HASH
    assert sol.attempts == 10730896


def test_verify_six_zero_neighbourhood():
    assert verify_pow(PUZZLE_PREFIX, 10730895, 6)
    assert not verify_pow(PUZZLE_PREFIX, 10730894, 6)


def test_verify_seven_and_eight():
    assert verify_pow(PUZZLE_PREFIX, 934224174, 7)
    assert sha256(b"blockchain934224174").hex() == SEVEN_ZERO_HASH
    assert not verify_pow(PUZZLE_PREFIX, 934224174, 8)
    assert verify_pow(PUZZLE_PREFIX, 8795718656, 8)
    assert sha256(b"blockchain8795718656").hex() == EIGHT_ZERO_HASH


def test_verify_uses_one_hash():
    calls = []

    def counting(data):
        calls.append(data)
        return sha256(data)

    assert verify_pow(PUZZLE_PREFIX, 8795718656, 8, hasher=counting)
    assert calls == [b"blockchain8795718656"]


def test_zero_difficulty_takes_nonce_zero():
    sol = mine_string(PUZZLE_PREFIX, 0)
    assert sol.nonce == 0 and sol.attempts == 1


@pytest.mark.parametrize("prefix", ["blockchain", "x", "ledger", ""])
@pytest.mark.parametrize("k", [1, 2])
def test_smallest_nonce_matches_exhaustive_oracle(prefix, k):
    assert mine_string(prefix, k).nonce == _oracle_nonce(prefix, k)


def test_start_nonce_and_cap():
    first = mine_string("blockchain", 2).nonce
    later = mine_string("blockchain", 2, start_nonce=first + 1)
    assert later.nonce > first
    assert later.attempts == later.nonce - first
    with pytest.raises(SearchLimitExceeded):
        mine_string("blockchain", 6, cap=1000)


def test_parallel_equals_sequential():
    for prefix in ("p0", "p1", "p2"):
        seq = mine_string(prefix, 3)
        par = mine_string(prefix, 3, workers=3, chunk=997)
        assert par.nonce == seq.nonce and par.hash == seq.hash


def _ranks(xs):
    order = sorted(range(len(xs)), key=lambda i: xs[i])
    r = [0] * len(xs)
    for rank, i in enumerate(order):
        r[i] = rank
    return r


def test_attempts_do_not_track_prefix_order():
    # attempts for successive prefixes should look like independent draws
    attempts = [mine_string(f"prefix-{i}", 2).attempts for i in range(40)]
    ra, rb = _ranks(list(range(40))), _ranks(attempts)
    n = len(ra)
    rho = 1 - 6 * sum((a - b) ** 2 for a, b in zip(ra, rb)) / (n * (n * n - 1))
    assert abs(rho) < 0.5


def test_difficulty_scaling_geometric_means():
    for k in (1, 2, 3):
        mean = sum(mine_string(f"scale-{k}-{i}", k).attempts for i in range(20)) / 20
        assert 16 ** k / 3 <= mean <= 3 * 16 ** k


def test_mine_block_golden():
    ts = GENESIS.header.timestamp + 600
    template = BlockHeader(1, GENESIS.block_hash, ZERO_HASH, ts)
    txs = [coinbase(b"\x11" * 20, 35, ts)]
    block = mine_block(template, txs, 3)
    # independent search over the canonical header bytes
    head = block.header
    raw = lambda n: (
        (1).to_bytes(8, "big") + GENESIS.block_hash + head.merkle_root
        + ts.to_bytes(8, "big") + n.to_bytes(8, "big") + (252).to_bytes(8, "big")
    )
    n = 0
    while not hashlib.sha256(hashlib.sha256(raw(n)).digest()).hexdigest().startswith("000"):
        n += 1
    assert head.nonce == n == 3038
    assert block.block_hash.hex() == "0001df6d7550843ec54af82a08944307866ddb687d64a2f4860371cc99610709"
    assert head.size == 252
    assert block.block_hash == double_sha256(raw(n))
    assert verify_pow(block, n, 3)
    assert append_block(Chain.new(3), block).height == 1


def test_retarget_examples():
    t = DifficultyTarget.from_zeros(4)
    # blocks twice as slow as desired: threshold doubles (easier)
    assert retarget([0, 20, 40], t, 10).threshold == 2 * t.threshold
    # on schedule: unchanged
    assert retarget([0, 10, 20], t, 10) == t
    # clamped both ways
    assert retarget([0, 1000], t, 10).threshold == 4 * t.threshold
    assert retarget([0, 0], t, 10).threshold == t.threshold // 4
    # window uses only the last intervals
    assert retarget([0, 500, 510, 520], t, 10, window=2) == t
    with pytest.raises(ValueError):
        retarget([5], t, 10)


def test_bench_output_shapes():
    recs = bench([0, 1, 2], prefix="blockchain")
    assert [r.difficulty for r in recs] == [0, 1, 2]
    assert recs[0].nonce == 0 and recs[0].attempts == 1
    md = bench_markdown(recs)
    assert md.count("\n") == 4 and "0x" in md
    csv_text = bench_csv(recs)
    assert csv_text.splitlines()[0] == "difficulty,nonce,attempts,seconds,hash"
    with pytest.raises(ValueError):
        bench([2, 1])


def test_attempt_distribution_is_roughly_geometric():
    rng = random.Random(3)
    samples = [mine_string(f"g{rng.random()}", 1).attempts for _ in range(400)]
    mean = sum(samples) / len(samples)
    assert 12 <= mean <= 20
