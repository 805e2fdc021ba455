"""``ledgerforge`` command line.

Exit codes: 0 success, 1 domain error (invalid chain, search cap, double
spend, bad config), 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path
from typing import List, Optional

from . import byzantine, mint, netsim, pos, pow
from .crypto import ZERO_HASH, Address, generate_keypair, keypair_from_label
from .ledger import (
    GENESIS_TIMESTAMP,
    BlockHeader,
    Chain,
    ChainError,
    append_block,
    coinbase,
    load_chain,
    make_transaction,
    save_chain,
    verify_chain,
)

BLOCK_INTERVAL = 600
CLI_REWARD = 35


class DomainError(Exception):
    pass


def _hex(h) -> str:
    return "0x" + h.hex()


def _emit(args, payload, table: str) -> None:
    if args.output == "json":
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(table)


def _seed(args) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    env = os.environ.get("LEDGERFORGE_SEED")
    if env:
        try:
            return int(env)
        except ValueError:
            raise DomainError(f"LEDGERFORGE_SEED must be an integer, got {env!r}")
    return 0


def _int_list(text: str) -> List[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


# -- bench -----------------------------------------------------------------

def cmd_bench(args) -> int:
    zeros = sorted(args.zeros)
    records = pow.bench(zeros, args.prefix, args.cap, args.start, args.note)
    if args.csv:
        Path(args.csv).write_text(pow.bench_csv(records))
    payload = [
        {"difficulty": r.difficulty, "nonce": r.nonce, "attempts": r.attempts,
         "seconds": round(r.elapsed, 4), "hash": r.hash}
        for r in records
    ]
    _emit(args, payload, pow.bench_markdown(records))
    return 0


# -- chain -----------------------------------------------------------------

def _load_txs(path: str):
    items = json.loads(Path(path).read_text())
    out = []
    for item in items:
        keys = generate_keypair(bytes.fromhex(item["sender_seed"]))
        out.append((keys, Address.fromhex(item["recipient"]), int(item["amount"])))
    return out


def _demo_txs(count: int, seed: int):
    users = [keypair_from_label(f"cli-user-{seed}-{u}") for u in range(3)]
    return [(users[i % 3], users[(i + 1) % 3].address, 1 + i % 7) for i in range(count)]


def build_chain(blocks: int, difficulty: int, seed: int, txs=None) -> Chain:
    miner = keypair_from_label(f"cli-miner-{seed}")
    chain = Chain.new(difficulty)
    txs = list(txs) if txs is not None else _demo_txs(blocks * 2, seed)
    per_block = math.ceil(len(txs) / blocks) if blocks else 0
    for i in range(1, blocks + 1):
        ts = GENESIS_TIMESTAMP + BLOCK_INTERVAL * i
        chunk = txs[(i - 1) * per_block:i * per_block]
        body = [coinbase(miner.address, CLI_REWARD, ts)]
        body += [make_transaction(k, r, a, ts) for k, r, a in chunk]
        template = BlockHeader(i, chain.tip, ZERO_HASH, ts)
        chain = append_block(chain, pow.mine_block(template, body, chain.difficulty))
    return chain


def _chain_file(args) -> Path:
    if not args.chain_file:
        raise DomainError("--chain-file is required")
    return Path(args.chain_file)


def cmd_chain(args) -> int:
    if args.action == "build":
        seed = _seed(args)
        txs = _load_txs(args.txs) if args.txs else None
        chain = build_chain(args.blocks, args.difficulty, seed, txs)
        written = False
        if args.write:
            save_chain(chain, _chain_file(args))
            written = True
        payload = {"blocks": len(chain), "tip": chain.tip.hex(), "difficulty": args.difficulty, "written": written}
        note = "" if written else " (dry run: pass --write and --chain-file to save)"
        _emit(args, payload, f"built {len(chain)} blocks, tip {_hex(chain.tip)}{note}")
        return 0

    try:
        chain = load_chain(_chain_file(args))
    except (OSError, ChainError) as exc:
        raise DomainError(str(exc))

    if args.action == "verify":
        check = verify_chain(chain)
        payload = {"ok": check.ok, "failure_index": check.failure_index, "errors": list(check.errors), "blocks": len(chain)}
        if check.ok:
            table = f"OK: {len(chain)} blocks verified, tip {_hex(chain.tip)}"
        else:
            table = f"FAIL at block {check.failure_index}: {', '.join(check.errors)}"
        _emit(args, payload, table)
        return 0 if check.ok else 1

    rows = []
    for b in chain.blocks:
        h = b.header
        rows.append({
            "height": h.height,
            "prev_hash": h.prev_hash.hex(),
            "block_hash": b.block_hash.hex(),
            "merkle_root": h.merkle_root.hex(),
            "timestamp": h.timestamp,
            "size": h.size,
            "nonce": h.nonce,
            "tx_count": len(b.transactions),
        })
    lines = ["| height | previous hash | block hash | merkle root | timestamp | size | nonce | txs |",
             "|---:|:---|:---|:---|---:|---:|---:|---:|"]
    for r in rows:
        lines.append(
            f"| {r['height']} | 0x{r['prev_hash'][:16]}… | 0x{r['block_hash'][:16]}… | 0x{r['merkle_root'][:16]}… "
            f"| {r['timestamp']} | {r['size']} | {r['nonce']} | {r['tx_count']} |"
        )
    _emit(args, {"target": chain.difficulty.hex(), "blocks": rows}, "\n".join(lines))
    return 0


# -- mint ------------------------------------------------------------------

def cmd_mint(args) -> int:
    events = mint.demo_transcript(args.value)
    lines = []
    for e in events:
        if e["step"] == "issue":
            lines.append(f"issue   {e['note']['value']} units -> serial 0x{e['note']['serial'][:16]}…")
        elif e["step"] == "verify":
            lines.append(f"verify  0x{e['serial'][:16]}… -> {e['status']}")
        elif e["ok"]:
            lines.append(f"spend   0x{e['serial'][:16]}… -> ok, fresh serial 0x{e['fresh_note']['serial'][:16]}…")
        else:
            lines.append(f"spend   0x{e['serial'][:16]}… -> REJECTED ({e['error']})")
    _emit(args, {"transcript": events}, "\n".join(lines))
    return 0


# -- pos -------------------------------------------------------------------

def cmd_pos(args) -> int:
    if args.stakes:
        try:
            table = pos.load_stakes(args.stakes)
        except (OSError, ValueError, KeyError) as exc:
            raise DomainError(f"cannot read stake table: {exc}")
        labels = {a: a.hex() for a in table.entries}
    else:
        table, names = pos.named_stakes({"A": 1, "B": 3})
        labels = {a: k for k, a in names.items()}
    seed = pos.seed_from_int(_seed(args))
    counts = pos.draw_counts(table, seed, args.rounds)
    rows = [
        {"validator": labels[a], "address": a.hex(), "stake": table[a], "selected": counts[a],
         "frequency": counts[a] / args.rounds if args.rounds else 0.0,
         "stake_fraction": table[a] / table.total}
        for a in table.entries
    ]
    lines = ["| validator | stake | selected | frequency | stake fraction |", "|:---|---:|---:|---:|---:|"]
    for r in rows:
        lines.append(f"| {r['validator']} | {r['stake']} | {r['selected']} | {r['frequency']:.4f} | {r['stake_fraction']:.4f} |")
    _emit(args, {"rounds": args.rounds, "seed": _seed(args), "validators": rows}, "\n".join(lines))
    return 0


# -- bgp -------------------------------------------------------------------

def cmd_bgp(args) -> int:
    order = byzantine.Order(args.order.upper())
    if args.scenario == "a":
        result = byzantine.run_scenario_a(order)
    elif args.scenario == "b":
        result = byzantine.run_scenario_b((order, order.flipped))
    else:
        traitors = args.traitors or []
        strategies = args.strategy.split(",")
        if len(strategies) == 1:
            strategies = {t: strategies[0] for t in traitors}
        elif len(strategies) == len(traitors):
            strategies = dict(zip(traitors, strategies))
        else:
            raise DomainError("give one strategy, or one per traitor")
        guard = None if args.guard == "none" else args.guard
        result = byzantine.run_sm(args.n, traitors, order, strategies, guard=guard)
    _emit(args, result.to_json(), byzantine.render_table(result))
    return 0


# -- sim -------------------------------------------------------------------

def cmd_sim(args) -> int:
    config = netsim.SimConfig.from_file(args.config)
    if args.seed is not None or os.environ.get("LEDGERFORGE_SEED"):
        config.rng_seed = _seed(args)
    sim = netsim.Simulation(config)
    report = sim.run()
    if args.events:
        Path(args.events).write_text(sim.event_log_jsonl())
    if args.report:
        Path(args.report).write_text(json.dumps(report.to_json(), indent=2, sort_keys=True) + "\n")
    incentives = netsim.incentive_report(report)
    lines = [
        f"consensus {report.consensus}, ticks {report.ticks} (+{report.final_tick - report.ticks} drain)",
        f"winning tip 0x{report.winning_tip} at height {report.winning_height}",
        f"converged: {report.converged}; forks {report.fork_count}; orphaned blocks {report.orphaned_blocks}",
        f"supply {report.total_supply} tenths (genesis {report.genesis_supply} + minted {report.minted})",
        f"event log digest {report.event_log_digest}",
        "",
        "| producer | blocks | rewards | fees | earnings |",
        "|:---|---:|---:|---:|---:|",
    ]
    for r in incentives["rows"]:
        lines.append(f"| {r['participant']} | {r['blocks_won']} | {r['rewards']} | {r['fees']} | {r['earnings']} |")
    if report.invariant_violations:
        lines.append("")
        lines.extend(f"VIOLATION: {v}" for v in report.invariant_violations)
    _emit(args, {"report": report.to_json(), "incentives": incentives, "digest": report.digest}, "\n".join(lines))
    return 1 if report.invariant_violations else 0


# -- parser ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="reproducibility seed (env LEDGERFORGE_SEED)")
    common.add_argument("--output", choices=("json", "table"), default=argparse.SUPPRESS)
    common.add_argument("--chain-file", default=argparse.SUPPRESS)

    p = argparse.ArgumentParser(prog="ledgerforge", description="Deterministic distributed-ledger workbench")
    p.add_argument("--seed", type=int, default=None, help="reproducibility seed (env LEDGERFORGE_SEED)")
    p.add_argument("--output", choices=("json", "table"), default="table")
    p.add_argument("--chain-file", default=None)
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bench", parents=[common], help="string-puzzle mining benchmark")
    b.add_argument("--zeros", type=_int_list, required=True, help="leading hex zeros, e.g. 6 or 1,2,3")
    b.add_argument("--prefix", default=pow.PUZZLE_PREFIX)
    b.add_argument("--cap", type=int, default=pow.DEFAULT_CAP)
    b.add_argument("--start", type=int, default=0)
    b.add_argument("--csv", help="also write the table as CSV to this path")
    b.add_argument("--note", default="", help="hardware note stored with each record")
    b.set_defaults(func=cmd_bench)

    c = sub.add_parser("chain", parents=[common], help="build, verify or inspect a JSON-lines chain file")
    c.add_argument("action", choices=("build", "verify", "inspect"))
    c.add_argument("--blocks", type=int, default=5)
    c.add_argument("--difficulty", type=int, default=2)
    c.add_argument("--txs", help="JSON array of {sender_seed, recipient, amount}")
    c.add_argument("--write", action="store_true", help="allow writing the chain file")
    c.set_defaults(func=cmd_chain)

    m = sub.add_parser("mint", parents=[common], help="serial-number mint demo")
    m.add_argument("action", choices=("demo",))
    m.add_argument("--value", type=int, default=10)
    m.set_defaults(func=cmd_mint)

    s = sub.add_parser("pos", parents=[common], help="proof-of-stake lottery")
    s.add_argument("action", choices=("draw",))
    s.add_argument("--stakes", help="JSON array of {address, stake}; default A:1, B:3")
    s.add_argument("--rounds", type=int, default=100_000)
    s.set_defaults(func=cmd_pos)

    g = sub.add_parser("bgp", parents=[common], help="Byzantine generals scenarios")
    g.add_argument("--scenario", choices=("a", "b", "custom"), default="a")
    g.add_argument("--n", type=int, default=4)
    g.add_argument("--traitors", type=_int_list, default=None)
    g.add_argument("--strategy", default=byzantine.ALTER_ORDER,
                   help="one of " + ", ".join(byzantine.STRATEGIES) + " (or one per traitor, comma-separated)")
    g.add_argument("--order", choices=("attack", "retreat"), default="attack")
    g.add_argument("--guard", choices=("third", "classic", "none"), default="third")
    g.set_defaults(func=cmd_bgp)

    r = sub.add_parser("sim", parents=[common], help="network simulation")
    r.add_argument("action", choices=("run",))
    r.add_argument("--config", required=True, help="SimConfig as JSON or TOML")
    r.add_argument("--events", help="write the event log as JSON lines")
    r.add_argument("--report", help="write the SimReport as JSON")
    r.set_defaults(func=cmd_sim)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DomainError, ChainError, pow.SearchLimitExceeded, mint.MintError, netsim.ConfigError,
            byzantine.TooManyTraitors, byzantine.DuplicateSigner, pos.ZeroStake) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
