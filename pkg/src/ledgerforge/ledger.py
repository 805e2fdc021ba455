"""Transactions, blocks and the append-only chain.

Byte layouts (all integers big-endian, no padding):

    transaction (152 bytes)
        sender            20
        recipient         20
        amount            u64
        timestamp         u64
        sender_public_key 32
        signature         64   (signature covers the first 88 bytes)

    header (96 bytes)
        height       u64
        prev_hash    32
        merkle_root  32
        timestamp    u64
        nonce        u64
        size         u64

    block = header || u32 tx count || transactions

A coinbase transaction has the all-zero sender, public key and signature; it
may only appear as the first transaction of a block.
"""
from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field, replace
from functools import cached_property
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple

from .crypto import (
    ADDRESS_SIZE,
    MAX_THRESHOLD,
    PUBLIC_KEY_SIZE,
    SIGNATURE_SIZE,
    ZERO_ADDRESS,
    ZERO_HASH,
    Address,
    DifficultyTarget,
    Hash256,
    KeyPair,
    derive_address,
    double_sha256,
    verify,
)
from .merkle import merkle_root

U64_MAX = (1 << 64) - 1
TX_UNSIGNED_SIZE = 2 * ADDRESS_SIZE + 8 + 8 + PUBLIC_KEY_SIZE
TX_SIZE = TX_UNSIGNED_SIZE + SIGNATURE_SIZE
HEADER_SIZE = 8 + 32 + 32 + 8 + 8 + 8
_TX_STRUCT = struct.Struct(">20s20sQQ32s64s")
_HEADER_STRUCT = struct.Struct(">Q32s32sQQQ")
_NULL_KEY = b"\x00" * PUBLIC_KEY_SIZE
_NULL_SIG = b"\x00" * SIGNATURE_SIZE

GENESIS_TIMESTAMP = 1231006505


class ChainError(Exception):
    """A block or chain failed validation."""

    def __init__(self, message: str, report: "ValidationReport | None" = None):
        super().__init__(message)
        self.report = report


@dataclass(frozen=True)
class Transaction:
    sender: Address
    recipient: Address
    amount: int
    timestamp: int
    sender_public_key: bytes = _NULL_KEY
    signature: bytes = _NULL_SIG

    def __post_init__(self):
        if not 0 <= self.amount <= U64_MAX:
            raise ValueError("amount must be a non-negative 64-bit integer")
        if not 0 <= self.timestamp <= U64_MAX:
            raise ValueError("timestamp must be a non-negative 64-bit integer")

    @cached_property
    def tx_id(self) -> Hash256:
        return double_sha256(canonical_tx_bytes(self))

    @property
    def is_coinbase(self) -> bool:
        return (
            self.sender == ZERO_ADDRESS
            and self.sender_public_key == _NULL_KEY
            and self.signature == _NULL_SIG
        )

    def signature_valid(self) -> bool:
        if derive_address(self.sender_public_key) != self.sender:
            return False
        return verify(self.sender_public_key, signing_bytes(self), self.signature)

    def to_json(self) -> dict:
        return {
            "tx_id": self.tx_id.hex(),
            "sender": self.sender.hex(),
            "recipient": self.recipient.hex(),
            "amount": self.amount,
            "timestamp": self.timestamp,
            "sender_public_key": self.sender_public_key.hex(),
            "signature": self.signature.hex(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Transaction":
        return cls(
            sender=Address.fromhex(obj["sender"]),
            recipient=Address.fromhex(obj["recipient"]),
            amount=obj["amount"],
            timestamp=obj["timestamp"],
            sender_public_key=bytes.fromhex(obj["sender_public_key"]),
            signature=bytes.fromhex(obj["signature"]),
        )


def make_transaction(keys: KeyPair, recipient: bytes, amount: int, timestamp: int) -> Transaction:
    unsigned = Transaction(keys.address, Address(recipient), amount, timestamp, keys.public_key)
    return replace(unsigned, signature=keys.sign(signing_bytes(unsigned)))


def coinbase(recipient: bytes, amount: int, timestamp: int) -> Transaction:
    return Transaction(ZERO_ADDRESS, Address(recipient), amount, timestamp)


def signing_bytes(tx: Transaction) -> bytes:
    return canonical_tx_bytes(tx)[:TX_UNSIGNED_SIZE]


def canonical_tx_bytes(tx: Transaction) -> bytes:
    return _TX_STRUCT.pack(
        tx.sender, tx.recipient, tx.amount, tx.timestamp, tx.sender_public_key, tx.signature
    )


def decode_tx_bytes(data: bytes) -> Transaction:
    if len(data) != TX_SIZE:
        raise ValueError(f"transaction encoding must be {TX_SIZE} bytes, got {len(data)}")
    sender, recipient, amount, ts, pk, sig = _TX_STRUCT.unpack(data)
    return Transaction(Address(sender), Address(recipient), amount, ts, pk, sig)


@dataclass(frozen=True)
class BlockHeader:
    height: int
    prev_hash: Hash256
    merkle_root: Hash256
    timestamp: int
    nonce: int = 0
    size: int = 0

    def __post_init__(self):
        for name in ("height", "timestamp", "nonce", "size"):
            if not 0 <= getattr(self, name) <= U64_MAX:
                raise ValueError(f"{name} must be a non-negative 64-bit integer")

    @property
    def block_hash(self) -> Hash256:
        return double_sha256(canonical_header_bytes(self))


def canonical_header_bytes(h: BlockHeader) -> bytes:
    return _HEADER_STRUCT.pack(h.height, h.prev_hash, h.merkle_root, h.timestamp, h.nonce, h.size)


def decode_header_bytes(data: bytes) -> BlockHeader:
    if len(data) != HEADER_SIZE:
        raise ValueError(f"header encoding must be {HEADER_SIZE} bytes, got {len(data)}")
    height, prev, root, ts, nonce, size = _HEADER_STRUCT.unpack(data)
    return BlockHeader(height, Hash256(prev), Hash256(root), ts, nonce, size)


def block_size(tx_count: int) -> int:
    return HEADER_SIZE + 4 + TX_SIZE * tx_count


@dataclass(frozen=True)
class Block:
    header: BlockHeader
    transactions: Tuple[Transaction, ...] = ()
    # cached; validate_block recomputes and compares
    block_hash: Hash256 = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        object.__setattr__(self, "transactions", tuple(self.transactions))
        if self.block_hash is None:
            object.__setattr__(self, "block_hash", self.header.block_hash)

    @property
    def height(self) -> int:
        return self.header.height

    def to_bytes(self) -> bytes:
        return (
            canonical_header_bytes(self.header)
            + struct.pack(">I", len(self.transactions))
            + b"".join(canonical_tx_bytes(t) for t in self.transactions)
        )

    @classmethod
    def from_bytes(cls, data: bytes) -> "Block":
        header = decode_header_bytes(data[:HEADER_SIZE])
        (count,) = struct.unpack(">I", data[HEADER_SIZE:HEADER_SIZE + 4])
        body = data[HEADER_SIZE + 4:]
        if len(body) != count * TX_SIZE:
            raise ValueError("transaction count does not match encoded length")
        txs = tuple(decode_tx_bytes(body[i:i + TX_SIZE]) for i in range(0, len(body), TX_SIZE))
        return cls(header, txs)

    def to_json(self, target: DifficultyTarget | None = None) -> dict:
        h = self.header
        obj = {
            "height": h.height,
            "prev_hash": h.prev_hash.hex(),
            "merkle_root": h.merkle_root.hex(),
            "timestamp": h.timestamp,
            "nonce": h.nonce,
            "size": h.size,
            "block_hash": self.block_hash.hex(),
            "transactions": [t.to_json() for t in self.transactions],
        }
        if target is not None:
            obj["target"] = target.hex()
        return obj

    @classmethod
    def from_json(cls, obj: dict) -> "Block":
        header = BlockHeader(
            obj["height"],
            Hash256.fromhex(obj["prev_hash"]),
            Hash256.fromhex(obj["merkle_root"]),
            obj["timestamp"],
            obj["nonce"],
            obj["size"],
        )
        txs = tuple(Transaction.from_json(t) for t in obj["transactions"])
        return cls(header, txs, Hash256.fromhex(obj["block_hash"]))


def seal_header(template: BlockHeader, txs: Sequence[Transaction]) -> BlockHeader:
    """Fill in merkle root and size from the transaction list."""
    return replace(
        template,
        merkle_root=merkle_root([t.tx_id for t in txs]),
        size=block_size(len(txs)),
    )


def genesis_block() -> Block:
    header = BlockHeader(0, ZERO_HASH, ZERO_HASH, GENESIS_TIMESTAMP, 0, block_size(0))
    return Block(header, ())


GENESIS = genesis_block()


@dataclass(frozen=True)
class ValidationReport:
    errors: Tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.errors

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class Chain:
    blocks: Tuple[Block, ...]
    difficulty: DifficultyTarget

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(self.blocks))
        if not self.blocks:
            raise ValueError("a chain holds at least the genesis block")

    @classmethod
    def new(cls, difficulty: DifficultyTarget | int = 0, genesis: Block = GENESIS) -> "Chain":
        if isinstance(difficulty, int):
            difficulty = DifficultyTarget.from_zeros(difficulty)
        return cls((genesis,), difficulty)

    @property
    def tip(self) -> Hash256:
        return self.blocks[-1].block_hash

    @property
    def tip_block(self) -> Block:
        return self.blocks[-1]

    @property
    def height(self) -> int:
        return self.blocks[-1].height

    def __len__(self) -> int:
        return len(self.blocks)

    def __iter__(self):
        return iter(self.blocks)

    def __getitem__(self, i):
        return self.blocks[i]

    @property
    def work(self) -> int:
        """Cumulative work of the non-genesis blocks."""
        return (len(self.blocks) - 1) * (MAX_THRESHOLD // self.difficulty.threshold)


def _check_body(b: Block, errors: List[str]) -> None:
    if b.header.block_hash != b.block_hash:
        errors.append("block-hash-mismatch")
    if merkle_root([t.tx_id for t in b.transactions]) != b.header.merkle_root:
        errors.append("merkle-mismatch")
    if b.header.size != block_size(len(b.transactions)):
        errors.append("size-mismatch")
    bad_sig = False
    for i, tx in enumerate(b.transactions):
        if tx.is_coinbase:
            if i != 0:
                errors.append("coinbase-misplaced")
        elif not bad_sig and not tx.signature_valid():
            bad_sig = True
    if bad_sig:
        errors.append("bad-signature")


def validate_block(chain: Chain, b: Block) -> ValidationReport:
    """Check ``b`` as the successor of ``chain``'s tip; report every violated rule."""
    tip = chain.tip_block
    errors: List[str] = []
    if b.header.prev_hash != chain.tip:
        errors.append("prev-hash-mismatch")
    if b.header.height != tip.height + 1:
        errors.append("height-mismatch")
    if b.header.timestamp < tip.header.timestamp:
        errors.append("timestamp-regression")
    if not chain.difficulty.meets(b.header.block_hash):
        errors.append("pow-failure")
    _check_body(b, errors)
    return ValidationReport(tuple(errors))


def validate_genesis(b: Block) -> ValidationReport:
    errors: List[str] = []
    if b.header.height != 0:
        errors.append("height-mismatch")
    if b.header.prev_hash != ZERO_HASH:
        errors.append("prev-hash-mismatch")
    _check_body(b, errors)
    return ValidationReport(tuple(errors))


def append_block(chain: Chain, b: Block) -> Chain:
    report = validate_block(chain, b)
    if not report.ok:
        raise ChainError(f"block rejected: {', '.join(report.errors)}", report)
    return Chain(chain.blocks + (b,), chain.difficulty)


@dataclass(frozen=True)
class ChainCheck:
    ok: bool
    failure_index: Optional[int] = None
    errors: Tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.ok


def verify_chain(chain: Chain) -> ChainCheck:
    """Re-validate every block against its predecessor prefix."""
    report = validate_genesis(chain.blocks[0])
    if not report.ok:
        return ChainCheck(False, 0, report.errors)
    prefix = Chain(chain.blocks[:1], chain.difficulty)
    for i in range(1, len(chain.blocks)):
        b = chain.blocks[i]
        report = validate_block(prefix, b)
        if not report.ok:
            return ChainCheck(False, i, report.errors)
        prefix = Chain(prefix.blocks + (b,), chain.difficulty)
    return ChainCheck(True)


def chain_to_jsonl(chain: Chain) -> str:
    return "".join(
        json.dumps(b.to_json(chain.difficulty), separators=(",", ":")) + "\n" for b in chain.blocks
    )


def chain_from_jsonl(text: str) -> Chain:
    """Parse a JSON-lines chain. Content is not validated here; use verify_chain."""
    blocks = []
    target = None
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
            blocks.append(Block.from_json(obj))
        except (ValueError, KeyError, TypeError) as exc:
            raise ChainError(f"line {lineno}: malformed block ({exc})") from exc
        if "target" in obj:
            t = DifficultyTarget.fromhex(obj["target"])
            if target is not None and t != target:
                raise ChainError(f"line {lineno}: target differs from earlier lines")
            target = t
    if not blocks:
        raise ChainError("chain file holds no blocks")
    return Chain(tuple(blocks), target or DifficultyTarget(MAX_THRESHOLD))


def save_chain(chain: Chain, path: str | Path) -> None:
    Path(path).write_text(chain_to_jsonl(chain))


def load_chain(path: str | Path) -> Chain:
    return chain_from_jsonl(Path(path).read_text())


def chain_tx_ids(chain: Chain) -> set:
    return {t.tx_id for b in chain.blocks for t in b.transactions}


def iter_headers(chain: Chain) -> Iterable[BlockHeader]:
    return (b.header for b in chain.blocks)
