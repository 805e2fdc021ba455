import hashlib

import pytest
from hypothesis import given, strategies as st

from ledgerforge.crypto import ZERO_HASH, sha256
from ledgerforge.merkle import (
    MerkleProof,
    build_tree,
    merkle_prove,
    merkle_root,
    merkle_verify,
)


def _oracle_root(leaves):
    """Straight hashlib reference: pair up, duplicating an odd tail."""
    d = lambda b: hashlib.sha256(hashlib.sha256(b).digest()).digest()
    if not leaves:
        return bytes(32)
    level = list(leaves)
    while True:
        if len(level) % 2:
            level.append(level[-1])
        level = [d(level[i] + level[i + 1]) for i in range(0, len(level), 2)]
        if len(level) == 1:
            return level[0]


A, B, C = (sha256(x) for x in (b"a", b"b", b"c"))


def test_empty_tree_root_is_zero():
    assert merkle_root([]) == ZERO_HASH


def test_single_leaf_pairs_with_itself():
    assert merkle_root([A]).hex() == "adc908e5eb2414c119ca5c767cb464441edfc2991791ab08a3e8e274193e4fcc"


def test_three_leaf_golden():
    assert merkle_root([A, B, C]).hex() == "bd26024cc30d3da0b368d88e3183968d1da0f746bcb2c7e287499396f1e0267d"


@given(st.lists(st.binary(min_size=32, max_size=32), max_size=40))
def test_root_matches_oracle(leaves):
    assert merkle_root(leaves) == _oracle_root(leaves)


@pytest.mark.parametrize("n", range(1, 33))
def test_every_proof_round_trips(n):
    leaves = [sha256(i.to_bytes(4, "big")) for i in range(n)]
    tree = build_tree(leaves)
    depth = max(1, (n - 1).bit_length())
    for i, leaf in enumerate(leaves):
        proof = merkle_prove(tree, i)
        assert len(proof.path) == depth
        assert merkle_verify(tree.root, leaf, proof)
        assert merkle_verify(tree.root, leaf, MerkleProof.from_json(proof.to_json()))


def test_tampered_proof_and_leaf_fail():
    leaves = [sha256(bytes([i])) for i in range(7)]
    tree = build_tree(leaves)
    proof = merkle_prove(tree, 3)
    assert not merkle_verify(tree.root, sha256(b"other"), proof)
    h, side = proof.path[1]
    bad = MerkleProof(proof.leaf_index, proof.path[:1] + ((bytes([h[0] ^ 1]) + h[1:], side),) + proof.path[2:])
    assert not merkle_verify(tree.root, leaves[3], bad)
    flipped = MerkleProof(proof.leaf_index, ((proof.path[0][0], "left" if proof.path[0][1] == "right" else "right"),) + proof.path[1:])
    assert not merkle_verify(tree.root, leaves[3], flipped)
    # a proof for a different index does not transfer
    assert not merkle_verify(tree.root, leaves[4], proof)


def test_order_sensitivity():
    assert merkle_root([A, B, C]) != merkle_root([B, A, C])


def test_out_of_range_index():
    tree = build_tree([A, B])
    with pytest.raises(IndexError):
        merkle_prove(tree, 2)
    with pytest.raises(IndexError):
        merkle_prove(build_tree([]), 0)
