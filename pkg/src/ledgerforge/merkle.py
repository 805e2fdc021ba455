"""Merkle trees over transaction ids, with inclusion proofs for light clients.

Inner nodes are double_sha256(left || right). A level with an odd count pairs
its last node with itself. The root of an empty list is the all-zero hash.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence, Tuple

from .crypto import ZERO_HASH, Hash256, double_sha256

LEFT = "left"
RIGHT = "right"


@dataclass(frozen=True)
class MerkleTree:
    leaves: Tuple[Hash256, ...]
    levels: Tuple[Tuple[Hash256, ...], ...]

    @property
    def root(self) -> Hash256:
        if not self.leaves:
            return ZERO_HASH
        return self.levels[-1][0]


@dataclass(frozen=True)
class MerkleProof:
    leaf_index: int
    # (sibling hash, side the sibling sits on)
    path: Tuple[Tuple[Hash256, str], ...]

    def to_json(self) -> dict:
        return {
            "leaf_index": self.leaf_index,
            "path": [{"hash": h.hex(), "side": side} for h, side in self.path],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "MerkleProof":
        return cls(
            obj["leaf_index"],
            tuple((Hash256.fromhex(p["hash"]), p["side"]) for p in obj["path"]),
        )


def _next_level(level: Sequence[Hash256]) -> List[Hash256]:
    out = []
    for i in range(0, len(level), 2):
        left = level[i]
        right = level[i + 1] if i + 1 < len(level) else left
        out.append(double_sha256(left + right))
    return out


def build_tree(tx_ids: Sequence[bytes]) -> MerkleTree:
    leaves = tuple(Hash256(t) for t in tx_ids)
    if not leaves:
        return MerkleTree((), ())
    levels = [leaves]
    # a single leaf still gets hashed with itself so the root is never a raw tx id
    while len(levels) == 1 or len(levels[-1]) > 1:
        levels.append(tuple(_next_level(levels[-1])))
    return MerkleTree(leaves, tuple(levels))


def merkle_root(tx_ids: Sequence[bytes]) -> Hash256:
    return build_tree(tx_ids).root


def merkle_prove(tree: MerkleTree, index: int) -> MerkleProof:
    if not 0 <= index < len(tree.leaves):
        raise IndexError(f"leaf index {index} out of range for {len(tree.leaves)} leaves")
    path = []
    pos = index
    for level in tree.levels[:-1]:
        if pos % 2 == 0:
            sibling = level[pos + 1] if pos + 1 < len(level) else level[pos]
            path.append((sibling, RIGHT))
        else:
            path.append((level[pos - 1], LEFT))
        pos //= 2
    return MerkleProof(index, tuple(path))


def merkle_verify(root: bytes, leaf: bytes, proof: MerkleProof) -> bool:
    node = bytes(leaf)
    pos = proof.leaf_index
    for sibling, side in proof.path:
        if side != (RIGHT if pos % 2 == 0 else LEFT):
            return False
        pos //= 2
        if side == RIGHT:
            node = double_sha256(node + sibling)
        else:
            node = double_sha256(sibling + node)
    return node == root and pos == 0
