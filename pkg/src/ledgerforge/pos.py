"""Stake-weighted validator lottery with fee-only rewards."""
from __future__ import annotations

import bisect
import json
from dataclasses import dataclass
from pathlib import Path
from types import MappingProxyType
from typing import Dict, List, Mapping, Tuple

from .crypto import Address, double_sha256, sha256


class ZeroStake(ValueError):
    pass


class StakeTable:
    """Immutable address -> stake mapping kept in ascending address-byte order."""

    def __init__(self, entries: Mapping[bytes, int]):
        clean: Dict[Address, int] = {}
        for addr, stake in entries.items():
            if stake < 0:
                raise ValueError(f"negative stake for {bytes(addr).hex()}")
            clean[Address(addr)] = int(stake)
        self.entries = MappingProxyType(dict(sorted(clean.items())))
        self.total = sum(self.entries.values())
        # cumulative upper bounds of the half-open intervals, zero stakes dropped
        self._addrs: List[Address] = []
        self._bounds: List[int] = []
        acc = 0
        for addr, stake in self.entries.items():
            if stake > 0:
                acc += stake
                self._addrs.append(addr)
                self._bounds.append(acc)

    def __getitem__(self, addr: bytes) -> int:
        return self.entries[Address(addr)]

    def __len__(self) -> int:
        return len(self.entries)

    def __eq__(self, other) -> bool:
        return isinstance(other, StakeTable) and dict(self.entries) == dict(other.entries)

    def __repr__(self) -> str:
        return f"StakeTable({ {a.hex()[:8]: s for a, s in self.entries.items()} })"

    def pick(self, r: int) -> Address:
        """Address whose interval [lo, hi) contains ``r``."""
        return self._addrs[bisect.bisect_right(self._bounds, r)]

    def to_json(self) -> list:
        return [{"address": a.hex(), "stake": s} for a, s in self.entries.items()]

    @classmethod
    def from_json(cls, items: list) -> "StakeTable":
        return cls({Address.fromhex(i["address"]): i["stake"] for i in items})


def load_stakes(path: str | Path) -> StakeTable:
    return StakeTable.from_json(json.loads(Path(path).read_text()))


@dataclass(frozen=True)
class ValidationRound:
    round_number: int
    seed: bytes
    selected: Address
    fees_paid: int = 0


def lottery_draw(seed: bytes, round_number: int, total: int) -> int:
    digest = double_sha256(bytes(seed) + round_number.to_bytes(8, "big"))
    return int.from_bytes(digest, "big") % total


def select_validator(stakes: StakeTable, seed: bytes, round_number: int) -> Address:
    if len(seed) != 32:
        raise ValueError("lottery seed must be 32 bytes")
    if stakes.total <= 0:
        raise ZeroStake("total stake is zero; no validator can be selected")
    return stakes.pick(lottery_draw(seed, round_number, stakes.total))


def run_round(stakes: StakeTable, seed: bytes, round_number: int, fees: int = 0) -> ValidationRound:
    return ValidationRound(round_number, bytes(seed), select_validator(stakes, seed, round_number), fees)


def settle_round(stakes: StakeTable, rnd: ValidationRound, block_fees: int) -> StakeTable:
    """Credit ``block_fees`` to the round's validator. No coins are created."""
    if block_fees < 0:
        raise ValueError("fees cannot be negative")
    if stakes.entries.get(rnd.selected, 0) <= 0:
        raise ValueError("selected address holds no stake")
    if block_fees == 0:
        return stakes
    entries = dict(stakes.entries)
    entries[rnd.selected] += block_fees
    return StakeTable(entries)


def draw_counts(stakes: StakeTable, seed: bytes, rounds: int, start: int = 0) -> Dict[Address, int]:
    counts = {a: 0 for a in stakes.entries}
    for r in range(start, start + rounds):
        counts[select_validator(stakes, seed, r)] += 1
    return counts


def seed_from_int(seed: int) -> bytes:
    """32-byte lottery seed from an integer CLI/config seed."""
    return seed.to_bytes(32, "big")


def label_address(label: str) -> Address:
    """Deterministic address for a named staker: sha256(label)[:20]."""
    return Address(sha256(label.encode())[:20])


def named_stakes(stakes: Mapping[str, int]) -> Tuple[StakeTable, Dict[str, Address]]:
    names = {label: label_address(label) for label in stakes}
    return StakeTable({names[k]: v for k, v in stakes.items()}), names
