"""Proof-of-work: the string puzzle, block mining, verification and retargeting.

The string puzzle hashes the UTF-8 prefix followed by the decimal digits of the
nonce, e.g. ``sha256(b"blockchain10730895")``. Block mining double-hashes the
96-byte canonical header with the nonce as a big-endian u64.
"""
from __future__ import annotations

import csv
import hashlib
import io
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, List, Optional, Sequence

from .crypto import MAX_THRESHOLD, DifficultyTarget, Hash256, double_sha256, sha256
from .ledger import Block, BlockHeader, Transaction, canonical_header_bytes, seal_header

PUZZLE_PREFIX = "blockchain"
DEFAULT_CAP = 1 << 33
RETARGET_CLAMP = 4


class SearchLimitExceeded(Exception):
    def __init__(self, cap: int, start: int):
        super().__init__(f"no solution within {cap} guesses from nonce {start}")
        self.cap = cap
        self.start = start


@dataclass(frozen=True)
class PowSolution:
    nonce: int
    hash: Hash256
    attempts: int
    elapsed: float


@dataclass(frozen=True)
class BenchRecord:
    difficulty: int
    nonce: int
    attempts: int
    elapsed: float
    hash: str
    hardware_note: str = ""


def _as_target(difficulty: DifficultyTarget | int) -> DifficultyTarget:
    if isinstance(difficulty, DifficultyTarget):
        return difficulty
    return DifficultyTarget.from_zeros(difficulty)


def puzzle_input(prefix: str, nonce: int) -> bytes:
    return f"{prefix}{nonce}".encode("utf-8")


def _scan_string(prefix: str, threshold: int, start: int, stop: int) -> Optional[int]:
    """Smallest nonce in [start, stop) solving the string puzzle, else None."""
    if threshold == MAX_THRESHOLD:
        return start if start < stop else None
    # bytes compare lexicographically, which equals big-endian integer order
    limit = threshold.to_bytes(32, "big")
    base = hashlib.sha256(prefix.encode("utf-8"))
    copy = base.copy
    for nonce in range(start, stop):
        h = copy()
        h.update(str(nonce).encode())
        if h.digest() < limit:
            return nonce
    return None


def mine_string(
    prefix: str,
    difficulty: DifficultyTarget | int,
    start_nonce: int = 0,
    cap: int = DEFAULT_CAP,
    workers: int = 1,
    chunk: int = 1 << 20,
) -> PowSolution:
    """Smallest nonce >= ``start_nonce`` whose puzzle hash meets ``difficulty``.

    With ``workers > 1`` the nonce range is split into chunks searched in
    parallel; the lowest solving chunk wins, so the result equals the
    sequential search.
    """
    target = _as_target(difficulty)
    stop = start_nonce + cap
    t0 = time.perf_counter()
    if workers <= 1:
        nonce = _scan_string(prefix, target.threshold, start_nonce, stop)
    else:
        nonce = _parallel_scan(prefix, target.threshold, start_nonce, stop, workers, chunk)
    elapsed = time.perf_counter() - t0
    if nonce is None:
        raise SearchLimitExceeded(cap, start_nonce)
    return PowSolution(nonce, sha256(puzzle_input(prefix, nonce)), nonce - start_nonce + 1, elapsed)


def _parallel_scan(prefix, threshold, start, stop, workers, chunk) -> Optional[int]:
    with ProcessPoolExecutor(max_workers=workers) as pool:
        lo = start
        while lo < stop:
            bounds = []
            for _ in range(workers):
                if lo >= stop:
                    break
                hi = min(lo + chunk, stop)
                bounds.append((lo, hi))
                lo = hi
            futures = [pool.submit(_scan_string, prefix, threshold, a, b) for a, b in bounds]
            found = [f.result() for f in futures]
            hits = [n for n in found if n is not None]
            if hits:
                return min(hits)
    return None


def mine_block(
    header_template: BlockHeader,
    txs: Sequence[Transaction],
    difficulty: DifficultyTarget | int,
    cap: int = DEFAULT_CAP,
    start_nonce: int = 0,
) -> Block:
    """Seal the template over ``txs`` and search nonces upward from ``start_nonce``.

    The template's merkle root and size are recomputed from ``txs``.
    """
    target = _as_target(difficulty)
    header = seal_header(header_template, txs)
    nonce = find_header_nonce(header, target, start_nonce, start_nonce + cap)
    if nonce is None:
        raise SearchLimitExceeded(cap, start_nonce)
    return Block(replace(header, nonce=nonce), tuple(txs))


def find_header_nonce(header: BlockHeader, target: DifficultyTarget, start: int, stop: int) -> Optional[int]:
    """Smallest nonce in [start, stop) for which the header hash meets ``target``."""
    if target.threshold == MAX_THRESHOLD:
        return start if start < stop else None
    raw = canonical_header_bytes(header)
    head, tail = raw[:80], raw[88:]
    limit = target.threshold.to_bytes(32, "big")
    sha = hashlib.sha256
    for nonce in range(start, min(stop, 1 << 64)):
        if sha(sha(head + nonce.to_bytes(8, "big") + tail).digest()).digest() < limit:
            return nonce
    return None


def verify_pow(
    puzzle: str | Block,
    claimed_nonce: int,
    difficulty: DifficultyTarget | int,
    hasher: Callable[[bytes], bytes] | None = None,
) -> bool:
    """Check a claimed nonce with a single hash computation.

    ``puzzle`` is either a string-puzzle prefix or a block whose header nonce
    is replaced by ``claimed_nonce``. ``hasher`` lets tests count digests; it
    defaults to sha256 for strings and double_sha256 for blocks.
    """
    target = _as_target(difficulty)
    if isinstance(puzzle, Block):
        header = replace(puzzle.header, nonce=claimed_nonce)
        digest = (hasher or double_sha256)(canonical_header_bytes(header))
    else:
        digest = (hasher or sha256)(puzzle_input(puzzle, claimed_nonce))
    return target.meets(digest)


def retarget(
    history: Sequence[int],
    current: DifficultyTarget,
    desired_interval: int,
    window: int | None = None,
) -> DifficultyTarget:
    """Scale the threshold by observed/desired mean block interval, clamped to x4 / ÷4.

    ``history`` holds block timestamps, oldest first; the last ``window``
    intervals are used.
    """
    if len(history) < 2:
        raise ValueError("retarget needs at least two timestamps")
    if desired_interval <= 0:
        raise ValueError("desired interval must be positive")
    if window is None or window >= len(history):
        window = len(history) - 1
    recent = history[-(window + 1):]
    elapsed = max(recent[-1] - recent[0], 0)
    new = current.threshold * elapsed // (desired_interval * window)
    lo = max(current.threshold // RETARGET_CLAMP, 1)
    hi = min(current.threshold * RETARGET_CLAMP, MAX_THRESHOLD)
    return DifficultyTarget(min(max(new, lo), hi))


def bench(
    difficulties: Sequence[int],
    prefix: str = PUZZLE_PREFIX,
    cap: int = DEFAULT_CAP,
    start_nonce: int = 0,
    hardware_note: str = "",
) -> List[BenchRecord]:
    if list(difficulties) != sorted(difficulties):
        raise ValueError("difficulties must be sorted ascending")
    records = []
    for k in difficulties:
        sol = mine_string(prefix, k, start_nonce, cap)
        records.append(BenchRecord(k, sol.nonce, sol.attempts, sol.elapsed, sol.hash.hex(), hardware_note))
    return records


def bench_markdown(records: Sequence[BenchRecord]) -> str:
    lines = [
        "| difficulty | nonce | attempts | seconds | hash |",
        "|---:|---:|---:|---:|:---|",
    ]
    for r in records:
        lines.append(f"| {r.difficulty} | {r.nonce} | {r.attempts} | {r.elapsed:.2f} | 0x{r.hash} |")
    return "\n".join(lines)


def bench_csv(records: Sequence[BenchRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["difficulty", "nonce", "attempts", "seconds", "hash"])
    for r in records:
        w.writerow([r.difficulty, r.nonce, r.attempts, f"{r.elapsed:.4f}", r.hash])
    return buf.getvalue()
