"""Deterministic discrete-event simulation of a ledger network.

Time advances in integer ticks. Each tick first drains queued events for that
tick (in insertion order), then lets producers act, then syncs lightweight
nodes and checks invariants. Propagation delays are drawn from a seeded
``random.Random`` so a config and seed always replay byte-identically.

PoW miners test ``hashes_per_tick`` real nonces per tick against their current
template. PoS validators are drawn once per slot from the stake table. After
``max_ticks`` the run drains in-flight messages; if full nodes still disagree
(equal-work forks), the lowest-id producer extends its tip until they converge.
"""
from __future__ import annotations

import hashlib
import heapq
import itertools
import json
import random
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from .crypto import MAX_THRESHOLD, ZERO_HASH, Address, DifficultyTarget, Hash256, keypair_from_label
from .ledger import (
    GENESIS_TIMESTAMP,
    Block,
    BlockHeader,
    Chain,
    ChainError,
    Transaction,
    chain_tx_ids,
    coinbase,
    make_transaction,
    seal_header,
    validate_block,
    verify_chain,
)
from .merkle import MerkleProof, build_tree, merkle_prove, merkle_verify
from .pos import StakeTable, ValidationRound, seed_from_int, select_validator, settle_round
from .pow import find_header_nonce, mine_block, retarget

FULL = "full"
MINING = "mining"
LIGHTWEIGHT = "lightweight"

BLOCK_FOUND = "block-found"
BLOCK_RECEIVED = "block-received"
TX_SUBMITTED = "tx-submitted"
RETARGET = "retarget"


class ConfigError(ValueError):
    pass


class UnknownHeader(LookupError):
    pass


@dataclass
class SimConfig:
    mining_nodes: int = 2
    full_nodes: int = 1
    lightweight_nodes: int = 1
    consensus: str = "pow"
    difficulty: int = 2
    hashes_per_tick: int = 16
    # per mining node, PoS only
    stakes: Optional[List[int]] = None
    # coin units are tenths: 35 = 3.5 coins
    block_reward: int = 35
    tx_fee: int = 1
    tx_interval: int = 0
    users: int = 3
    initial_balance: int = 1000
    propagation_delay: Tuple[int, int] = (1, 3)
    slot_ticks: int = 5
    rng_seed: int = 0
    max_ticks: int = 200
    # mining-node ids allowed to produce blocks; None = permissionless
    permissioned: Optional[List[int]] = None
    # forced block-found events [{"tick": t, "node": miner id}]; disables hash-rate mining
    schedule: Optional[List[dict]] = None
    retarget_window: int = 0
    desired_interval: int = 10
    max_block_txs: int = 8
    max_tiebreak_blocks: int = 16

    def __post_init__(self):
        self.propagation_delay = tuple(self.propagation_delay)
        self.validate()

    def validate(self) -> None:
        if self.mining_nodes < 1:
            raise ConfigError("at least one mining/validating node is required")
        if self.full_nodes < 0 or self.lightweight_nodes < 0:
            raise ConfigError("node counts cannot be negative")
        if self.lightweight_nodes and not (self.full_nodes or self.mining_nodes):
            raise ConfigError("lightweight nodes need a full node to sync from")
        if self.consensus not in ("pow", "pos"):
            raise ConfigError(f"consensus must be 'pow' or 'pos', got {self.consensus!r}")
        lo, hi = self.propagation_delay
        if not 1 <= lo <= hi:
            raise ConfigError("propagation_delay must satisfy 1 <= lo <= hi")
        if not 0 <= self.difficulty <= 64:
            raise ConfigError("difficulty must be within [0, 64] leading zeros")
        if self.hashes_per_tick < 1 or self.max_ticks < 1:
            raise ConfigError("hashes_per_tick and max_ticks must be positive")
        if self.block_reward < 0 or self.tx_fee < 0:
            raise ConfigError("rewards and fees cannot be negative")
        if self.permissioned is not None:
            if not self.permissioned:
                raise ConfigError("permissioned list must name at least one producer")
            if any(not 0 <= i < self.mining_nodes for i in self.permissioned):
                raise ConfigError("permissioned ids must name mining nodes")
        if self.consensus == "pos":
            if self.stakes is None or len(self.stakes) != self.mining_nodes:
                raise ConfigError("PoS needs one stake per mining node")
            if any(s < 0 for s in self.stakes) or sum(self._producer_stakes()) <= 0:
                raise ConfigError("PoS needs a positive total stake among permitted validators")
            if self.slot_ticks <= hi:
                raise ConfigError("slot_ticks must exceed the maximum propagation delay")
        if self.schedule is not None:
            for entry in self.schedule:
                if not 0 <= entry["node"] < self.mining_nodes:
                    raise ConfigError(f"schedule names unknown miner {entry['node']}")

    def _producer_stakes(self) -> List[int]:
        allowed = set(self.permissioned) if self.permissioned is not None else None
        return [s for i, s in enumerate(self.stakes or []) if allowed is None or i in allowed]

    @property
    def target(self) -> DifficultyTarget:
        if self.consensus == "pos":
            return DifficultyTarget(MAX_THRESHOLD)
        return DifficultyTarget.from_zeros(self.difficulty)

    def to_json(self) -> dict:
        d = asdict(self)
        d["propagation_delay"] = list(self.propagation_delay)
        return d

    @classmethod
    def from_dict(cls, obj: dict) -> "SimConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(obj) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**obj)

    @classmethod
    def from_file(cls, path: str | Path) -> "SimConfig":
        path = Path(path)
        text = path.read_text()
        if path.suffix.lower() == ".toml":
            try:
                import tomllib
            except ModuleNotFoundError:
                import tomli as tomllib
            return cls.from_dict(tomllib.loads(text))
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class SimEvent:
    tick: int
    kind: str
    payload: dict


def resolve_fork(local: Chain, candidate: Chain, verified: bool = False) -> Chain:
    """Keep the chain with more cumulative work; ties keep ``local`` (first seen).

    Unless ``verified``, the candidate is fully re-validated and rejected with
    ChainError when invalid.
    """
    if candidate.blocks[0].block_hash != local.blocks[0].block_hash:
        raise ChainError("candidate does not share our genesis block")
    if not verified:
        check = verify_chain(candidate)
        if not check.ok:
            raise ChainError(f"candidate invalid at block {check.failure_index}: {', '.join(check.errors)}")
    return candidate if candidate.work > local.work else local


class FullNode:
    """Stores and validates every block. Mining nodes additionally produce blocks."""

    def __init__(self, node_id: int, name: str, kind: str, genesis_chain: Chain):
        self.id = node_id
        self.name = name
        self.kind = kind
        self.keys = keypair_from_label(f"node-{name}")
        self.address = self.keys.address
        self.chains: Dict[Hash256, Chain] = {genesis_chain.tip: genesis_chain}
        self.best = genesis_chain
        self.pending: Dict[Hash256, List[Block]] = {}
        self.mempool: Dict[Hash256, Transaction] = {}
        self.rejected = 0
        self.template: Optional[BlockHeader] = None
        self.template_txs: Tuple[Transaction, ...] = ()
        self.template_tip: Optional[Hash256] = None
        self.next_nonce = 0

    def receive_block(self, block: Block) -> str:
        h = block.block_hash
        if h in self.chains:
            return "duplicate"
        parent = self.chains.get(block.header.prev_hash)
        if parent is None:
            self.pending.setdefault(block.header.prev_hash, []).append(block)
            return "awaiting-parent"
        report = validate_block(parent, block)
        if not report.ok:
            self.rejected += 1
            return "rejected:" + ",".join(report.errors)
        new = Chain(parent.blocks + (block,), parent.difficulty)
        self.chains[h] = new
        old = self.best
        self.best = resolve_fork(old, new, verified=True)
        if self.best is old:
            outcome = "stored"
        elif new.blocks[-2].block_hash == old.tip:
            outcome = "extended"
        else:
            outcome = "reorg"
        for child in self.pending.pop(h, []):
            self.receive_block(child)
        return outcome

    def add_tx(self, tx: Transaction) -> str:
        if tx.tx_id in self.mempool:
            return "duplicate"
        if not tx.signature_valid():
            return "rejected:bad-signature"
        self.mempool[tx.tx_id] = tx
        return "accepted"

    def pending_txs(self, limit: int) -> List[Transaction]:
        included = chain_tx_ids(self.best)
        return [t for t in self.mempool.values() if t.tx_id not in included][:limit]


class LightNode:
    """Holds only the best header chain of its peer and checks Merkle proofs."""

    def __init__(self, node_id: int, name: str, peer: FullNode):
        self.id = node_id
        self.name = name
        self.kind = LIGHTWEIGHT
        self.peer = peer
        self.headers: List[BlockHeader] = []
        self.header_hashes: List[Hash256] = []

    def sync(self) -> None:
        if self.header_hashes and self.header_hashes[-1] == self.peer.best.tip:
            return
        self.headers = [b.header for b in self.peer.best.blocks]
        self.header_hashes = [b.block_hash for b in self.peer.best.blocks]


def spv_check(node: LightNode, tx_id: bytes, proof: MerkleProof, header: BlockHeader) -> bool:
    """True iff the proof ties ``tx_id`` to ``header`` and the header is on the node's best chain."""
    if header.height >= len(node.headers):
        raise UnknownHeader(f"{node.name} holds no header at height {header.height}")
    if node.header_hashes[header.height] != header.block_hash:
        return False
    return merkle_verify(header.merkle_root, tx_id, proof)


def prove_tx(block: Block, tx_id: bytes) -> MerkleProof:
    ids = [t.tx_id for t in block.transactions]
    return merkle_prove(build_tree(ids), ids.index(tx_id))


@dataclass
class SimReport:
    consensus: str
    ticks: int
    final_tick: int
    tips: Dict[str, str]
    winning_tip: str
    winning_height: int
    converged: bool
    fork_count: int
    orphaned_blocks: int
    blocks_mined: int
    blocks_won: Dict[str, int]
    rewards: Dict[str, int]
    fees: Dict[str, int]
    genesis_supply: int
    minted: int
    total_supply: int
    block_reward: int
    light_heights: Dict[str, int]
    final_stakes: Optional[Dict[str, int]]
    invariant_violations: List[str]
    event_count: int
    event_log_digest: str

    def to_json(self) -> dict:
        return asdict(self)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))

    @property
    def digest(self) -> str:
        return hashlib.sha256(self.dumps().encode()).hexdigest()


class Simulation:
    def __init__(self, config: SimConfig):
        config.validate()
        self.config = config
        self.rng = random.Random(config.rng_seed)
        self.target = config.target
        genesis_chain = Chain.new(self.target)
        self.miners = [FullNode(i, f"miner-{i}", MINING, genesis_chain) for i in range(config.mining_nodes)]
        base = config.mining_nodes
        self.fulls = [FullNode(base + j, f"full-{j}", FULL, genesis_chain) for j in range(config.full_nodes)]
        self.full_like: List[FullNode] = self.miners + self.fulls
        base += config.full_nodes
        peers = self.fulls or self.miners
        self.lights = [LightNode(base + k, f"light-{k}", peers[k % len(peers)]) for k in range(config.lightweight_nodes)]
        self.users = [keypair_from_label(f"user-{u}") for u in range(config.users)]
        self.user_spent = [0] * config.users
        self.genesis_supply = config.initial_balance * config.users
        self.by_address = {m.address: m for m in self.miners}
        self.permitted = set(config.permissioned) if config.permissioned is not None else set(range(config.mining_nodes))

        self.stakes: Optional[StakeTable] = None
        self.lottery_seed = seed_from_int(config.rng_seed)
        if config.consensus == "pos":
            self.stakes = StakeTable({
                m.address: s for m, s in zip(self.miners, config.stakes) if m.id in self.permitted
            })

        self.schedule: Dict[int, List[int]] = {}
        for entry in config.schedule or []:
            self.schedule.setdefault(entry["tick"], []).append(entry["node"])

        self._queue: List[Tuple[int, int, SimEvent]] = []
        self._seq = itertools.count()
        self.log: List[dict] = []
        self.mined: Dict[Hash256, Tuple[Block, str]] = {}
        self._supply_cache: Dict[Hash256, Tuple[int, int]] = {genesis_chain.tip: (self.genesis_supply, 0)}
        self.violations: List[str] = []
        self._retargeted_heights: set = set()
        self.tick = 0

    # -- event plumbing -------------------------------------------------

    def _schedule(self, tick: int, kind: str, payload: dict) -> None:
        heapq.heappush(self._queue, (tick, next(self._seq), SimEvent(tick, kind, payload)))

    def _record(self, tick: int, kind: str, **fields_) -> None:
        self.log.append({"tick": tick, "kind": kind, **fields_})

    def _delay(self) -> int:
        lo, hi = self.config.propagation_delay
        return self.rng.randint(lo, hi)

    def _broadcast_block(self, origin: FullNode, block: Block, tick: int) -> None:
        for node in self.full_like:
            if node is not origin:
                self._schedule(tick + self._delay(), BLOCK_RECEIVED, {"node": node.id, "block": block})

    def _node(self, node_id: int) -> FullNode:
        return self.full_like[node_id]

    def _handle(self, ev: SimEvent) -> None:
        node = self._node(ev.payload["node"])
        if ev.kind == BLOCK_RECEIVED:
            block = ev.payload["block"]
            outcome = node.receive_block(block)
            self._record(ev.tick, ev.kind, node=node.name, block=block.block_hash.hex(), height=block.height, outcome=outcome)
        elif ev.kind == TX_SUBMITTED:
            tx = ev.payload["tx"]
            outcome = node.add_tx(tx)
            self._record(ev.tick, ev.kind, node=node.name, tx=tx.tx_id.hex(), outcome=outcome)
        else:
            raise ValueError(f"unexpected queued event {ev.kind}")

    def _drain_tick(self, tick: int) -> None:
        while self._queue and self._queue[0][0] <= tick:
            _, _, ev = heapq.heappop(self._queue)
            self._handle(ev)

    # -- production -----------------------------------------------------

    @staticmethod
    def clock(tick: int) -> int:
        """Logical block timestamp for a tick."""
        return GENESIS_TIMESTAMP + tick

    def _block_txs(self, node: FullNode, tick: int, reward: int) -> List[Transaction]:
        return [coinbase(node.address, reward, self.clock(tick))] + node.pending_txs(self.config.max_block_txs)

    def _template(self, node: FullNode, tick: int) -> BlockHeader:
        tip = node.best.tip_block
        return BlockHeader(tip.height + 1, tip.block_hash, ZERO_HASH, self.clock(tick))

    def _publish(self, node: FullNode, block: Block, tick: int) -> None:
        self.mined[block.block_hash] = (block, node.name)
        outcome = node.receive_block(block)
        self._record(tick, BLOCK_FOUND, node=node.name, block=block.block_hash.hex(), height=block.height,
                     nonce=block.header.nonce, txs=len(block.transactions), outcome=outcome)
        self._broadcast_block(node, block, tick)

    def _forge(self, node: FullNode, tick: int) -> Block:
        """Build and fully solve a block on ``node``'s tip."""
        reward = self.config.block_reward if self.config.consensus == "pow" else 0
        return mine_block(self._template(node, tick), self._block_txs(node, tick, reward), self.target)

    def _pow_step(self, tick: int) -> None:
        if self.config.schedule is not None:
            for mid in self.schedule.get(tick, []):
                node = self.miners[mid]
                if mid in self.permitted:
                    self._publish(node, self._forge(node, tick), tick)
            return
        for node in self.miners:
            if node.id not in self.permitted:
                continue
            if node.template_tip != node.best.tip:
                txs = self._block_txs(node, tick, self.config.block_reward)
                node.template = seal_header(self._template(node, tick), txs)
                node.template_txs = tuple(txs)
                node.template_tip = node.best.tip
                node.next_nonce = 0
            start = node.next_nonce
            nonce = find_header_nonce(node.template, self.target, start, start + self.config.hashes_per_tick)
            node.next_nonce = start + self.config.hashes_per_tick
            if nonce is not None:
                header = node.template
                block = Block(BlockHeader(header.height, header.prev_hash, header.merkle_root,
                                          header.timestamp, nonce, header.size), node.template_txs)
                self._publish(node, block, tick)

    def _pos_step(self, tick: int) -> None:
        if tick == 0 or tick % self.config.slot_ticks:
            return
        slot = tick // self.config.slot_ticks
        addr = select_validator(self.stakes, self.lottery_seed, slot)
        node = self.by_address[addr]
        block = self._forge(node, tick)
        fees = self.config.tx_fee * (len(block.transactions) - 1)
        self._publish(node, block, tick)
        self.stakes = settle_round(self.stakes, ValidationRound(slot, self.lottery_seed, addr, fees), fees)

    def _submit_tx(self, tick: int) -> None:
        cfg = self.config
        if cfg.tx_interval <= 0 or cfg.users < 2 or tick % cfg.tx_interval:
            return
        sender = self.rng.randrange(cfg.users)
        recipient = (sender + 1 + self.rng.randrange(cfg.users - 1)) % cfg.users
        amount = self.rng.randint(1, 10)
        if self.user_spent[sender] + amount + cfg.tx_fee > cfg.initial_balance:
            return
        self.user_spent[sender] += amount + cfg.tx_fee
        tx = make_transaction(self.users[sender], self.users[recipient].address, amount, self.clock(tick))
        self._record(tick, "tx-created", tx=tx.tx_id.hex(), amount=amount)
        for node in self.full_like:
            self._schedule(tick + self._delay(), TX_SUBMITTED, {"node": node.id, "tx": tx})

    def _maybe_retarget(self, tick: int) -> None:
        cfg = self.config
        if cfg.consensus != "pow" or cfg.retarget_window <= 0:
            return
        chain = self.full_like[0].best
        h = chain.height
        if h == 0 or h % cfg.retarget_window or h in self._retargeted_heights:
            return
        self._retargeted_heights.add(h)
        stamps = [b.header.timestamp for b in chain.blocks[-(cfg.retarget_window + 1):]]
        new = retarget(stamps, self.target, cfg.desired_interval, cfg.retarget_window)
        self._record(tick, RETARGET, node=self.full_like[0].name, height=h,
                     current=self.target.hex(), proposed=new.hex())

    # -- accounting and invariants -------------------------------------

    def _supply(self, chain: Chain) -> Tuple[int, int]:
        """(total supply, minted) along ``chain``, cached per tip."""
        missing = []
        i = len(chain.blocks) - 1
        while chain.blocks[i].block_hash not in self._supply_cache:
            missing.append(chain.blocks[i])
            i -= 1
        supply, minted = self._supply_cache[chain.blocks[i].block_hash]
        for block in reversed(missing):
            cb = block.transactions[0] if block.transactions and block.transactions[0].is_coinbase else None
            reward = cb.amount if cb else 0
            supply += reward
            minted += reward
            self._supply_cache[block.block_hash] = (supply, minted)
        return supply, minted

    def _balances(self, chain: Chain) -> Tuple[Dict[Address, int], Dict[Address, int], Dict[Address, int], Dict[Address, int]]:
        fee = self.config.tx_fee
        balances: Dict[Address, int] = {u.address: self.config.initial_balance for u in self.users}
        rewards: Dict[Address, int] = {}
        fees: Dict[Address, int] = {}
        won: Dict[Address, int] = {}
        for block in chain.blocks[1:]:
            txs = block.transactions
            producer = txs[0].recipient
            won[producer] = won.get(producer, 0) + 1
            rewards[producer] = rewards.get(producer, 0) + txs[0].amount
            balances[producer] = balances.get(producer, 0) + txs[0].amount
            for tx in txs[1:]:
                balances[tx.sender] = balances.get(tx.sender, 0) - tx.amount - fee
                balances[tx.recipient] = balances.get(tx.recipient, 0) + tx.amount
                balances[producer] += fee
                fees[producer] = fees.get(producer, 0) + fee
        return balances, rewards, fees, won

    def _check_invariants(self, tick: int) -> None:
        for node in self.full_like:
            supply, minted = self._supply(node.best)
            if supply != self.genesis_supply + minted:
                self.violations.append(f"tick {tick}: supply mismatch at {node.name}")
        for light in self.lights:
            n = len(light.header_hashes)
            if not any(
                len(f.best.blocks) >= n and all(f.best.blocks[i].block_hash == light.header_hashes[i] for i in range(n))
                for f in self.full_like
            ):
                self.violations.append(f"tick {tick}: {light.name} header chain is no full node's prefix")

    def converged(self) -> bool:
        return len({n.best.tip for n in self.full_like}) == 1

    # -- main loop ------------------------------------------------------

    def step(self, tick: int, produce: bool = True) -> None:
        self.tick = tick
        self._drain_tick(tick)
        if produce:
            if self.config.consensus == "pow":
                self._pow_step(tick)
            else:
                self._pos_step(tick)
            self._submit_tx(tick)
            self._maybe_retarget(tick)
        for light in self.lights:
            light.sync()
        self._check_invariants(tick)

    def _drain(self, tick: int) -> int:
        while self._queue:
            self.step(tick, produce=False)
            tick += 1
        return tick

    def run(self) -> SimReport:
        cfg = self.config
        for tick in range(cfg.max_ticks):
            self.step(tick)
        tick = self._drain(cfg.max_ticks)
        extra = 0
        while not self.converged():
            if extra >= cfg.max_tiebreak_blocks:
                self.violations.append("full nodes failed to converge")
                break
            # every node now holds every block, so all tips carry equal maximal work;
            # one more block on the lowest-id producer's tip breaks the tie
            producer = self.miners[min(self.permitted)]
            self._publish(producer, self._forge(producer, tick), tick)
            tick = self._drain(tick + 1)
            extra += 1
        for light in self.lights:
            light.sync()
        return self.report(tick)

    def report(self, final_tick: int) -> SimReport:
        cfg = self.config
        winner = max((n.best for n in self.full_like), key=lambda c: c.work)
        winning = {b.block_hash for b in winner.blocks}
        names = {m.address: m.name for m in self.miners}
        balances, rewards, fees, won = self._balances(winner)
        supply, minted = self._supply(winner)
        if sum(balances.values()) != supply:
            self.violations.append("final balances do not sum to total supply")

        heights: Dict[int, set] = {}
        for h, (block, _) in self.mined.items():
            heights.setdefault(block.height, set()).add(h)
        forks = sum(1 for hs in heights.values() if len(hs) > 1)
        orphans = sum(1 for h in self.mined if h not in winning)

        log_bytes = "".join(json.dumps(e, sort_keys=True, separators=(",", ":")) + "\n" for e in self.log).encode()
        return SimReport(
            consensus=cfg.consensus,
            ticks=cfg.max_ticks,
            final_tick=final_tick,
            tips={n.name: n.best.tip.hex() for n in self.full_like},
            winning_tip=winner.tip.hex(),
            winning_height=winner.height,
            converged=self.converged(),
            fork_count=forks,
            orphaned_blocks=orphans,
            blocks_mined=len(self.mined),
            blocks_won={m.name: won.get(m.address, 0) for m in self.miners},
            rewards={m.name: rewards.get(m.address, 0) for m in self.miners},
            fees={m.name: fees.get(m.address, 0) for m in self.miners},
            genesis_supply=self.genesis_supply,
            minted=minted,
            total_supply=supply,
            block_reward=cfg.block_reward if cfg.consensus == "pow" else 0,
            light_heights={l.name: len(l.headers) - 1 for l in self.lights},
            final_stakes={names[a]: s for a, s in self.stakes.entries.items()} if self.stakes else None,
            invariant_violations=list(self.violations),
            event_count=len(self.log),
            event_log_digest=hashlib.sha256(log_bytes).hexdigest(),
        )

    def event_log_jsonl(self) -> str:
        return "".join(json.dumps(e, sort_keys=True) + "\n" for e in self.log)


def run_sim(config: SimConfig) -> SimReport:
    return Simulation(config).run()


def incentive_report(report: SimReport) -> dict:
    """Per-producer earnings; PoW earns rewards plus fees, PoS fees only."""
    rows = []
    for name in sorted(report.blocks_won):
        reward = report.rewards.get(name, 0)
        fee = report.fees.get(name, 0)
        rows.append({
            "participant": name,
            "blocks_won": report.blocks_won[name],
            "rewards": reward,
            "fees": fee,
            "earnings": reward + fee,
        })
    total_rewards = sum(r["rewards"] for r in rows)
    return {
        "rows": rows,
        "total_rewards": total_rewards,
        "total_fees": sum(r["fees"] for r in rows),
        "total_earnings": sum(r["earnings"] for r in rows),
        "minted": report.minted,
        "supply_delta": report.total_supply - report.genesis_supply,
        "reconciles": total_rewards == report.minted == report.total_supply - report.genesis_supply
        and total_rewards == sum(report.blocks_won.values()) * report.block_reward,
    }
