"""Byzantine generals with unforgeable signed orders.

General 0 is the commander; 1..n-1 are lieutenants. A signed order carries the
order value and a chain of (general id, signature) pairs. Signature ``j``
covers the session id, the order and every earlier (id, signature) pair, so
changing the order breaks every signature in the chain.

``run_sm`` relays orders to depth m+1 in synchronous rounds. Each loyal
lieutenant collects the set of validly signed order values it has seen and
decides the single value if there is exactly one, else RETREAT.
"""
from __future__ import annotations

import enum
import hashlib
import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

from .crypto import SIGNATURE_SIZE, KeyPair, keypair_from_label, verify

COMMANDER = 0
SESSION = 1

ALTER_ORDER = "alter-order"
SPLIT_ORDERS = "split-orders"
STAY_SILENT = "stay-silent"
REPLAY_STALE = "replay-stale"
SIGN_GARBAGE = "sign-garbage"
STRATEGIES = (ALTER_ORDER, SPLIT_ORDERS, STAY_SILENT, REPLAY_STALE, SIGN_GARBAGE)


class Order(str, enum.Enum):
    ATTACK = "ATTACK"
    RETREAT = "RETREAT"

    @property
    def flipped(self) -> "Order":
        return Order.RETREAT if self is Order.ATTACK else Order.ATTACK

    @property
    def code(self) -> bytes:
        return b"A" if self is Order.ATTACK else b"R"


DEFAULT_ORDER = Order.RETREAT


class DuplicateSigner(ValueError):
    pass


class TooManyTraitors(ValueError):
    pass


@dataclass(frozen=True)
class SignedOrder:
    order: Order
    signatures: Tuple[Tuple[int, bytes], ...] = ()
    session: int = SESSION

    @property
    def signers(self) -> Tuple[int, ...]:
        return tuple(gid for gid, _ in self.signatures)

    def content(self, upto: int) -> bytes:
        """Bytes covered by signature number ``upto``."""
        parts = [self.session.to_bytes(8, "big"), self.order.code]
        for gid, sig in self.signatures[:upto]:
            parts.append(gid.to_bytes(4, "big") + sig)
        return b"".join(parts)

    def to_json(self) -> dict:
        return {
            "order": self.order.value,
            "session": self.session,
            "signers": list(self.signers),
        }


@dataclass
class General:
    id: int
    keypair: KeyPair
    loyal: bool = True
    strategy: Optional[str] = None
    # (signer id, content) for every signature this general produced
    signed: Optional[Set[Tuple[int, bytes]]] = field(default=None, repr=False)

    @property
    def role(self) -> str:
        return "commander" if self.id == COMMANDER else "lieutenant"

    def sign(self, content: bytes) -> bytes:
        if self.signed is not None:
            self.signed.add((self.id, content))
        return self.keypair.sign(content)


@lru_cache(maxsize=None)
def general_keys(gid: int) -> KeyPair:
    return keypair_from_label(f"general-{gid}")


def _garbage(gid: int, msg: SignedOrder) -> bytes:
    seed = hashlib.sha256(b"garbage" + gid.to_bytes(4, "big") + msg.content(len(msg.signatures))).digest()
    return (seed * 2)[:SIGNATURE_SIZE]


def issue_order(g: General, order: Order, session: int = SESSION) -> SignedOrder:
    msg = SignedOrder(order, (), session)
    return SignedOrder(order, ((g.id, g.sign(msg.content(0))),), session)


def sign_and_forward(g: General, msg: SignedOrder, order: Order | None = None) -> SignedOrder:
    """Append ``g``'s signature. A traitor may swap the order first; it cannot re-sign for others."""
    if g.id in msg.signers:
        raise DuplicateSigner(f"general {g.id} already signed this order")
    if order is not None and order != msg.order:
        if g.loyal:
            raise ValueError("a loyal general forwards orders unchanged")
        msg = SignedOrder(order, msg.signatures, msg.session)
    content = msg.content(len(msg.signatures))
    return SignedOrder(msg.order, msg.signatures + ((g.id, g.sign(content)),), msg.session)


def verify_chain_integrity(msg: SignedOrder, public_keys: Mapping[int, bytes]) -> Optional[int]:
    """Index of the first signature that fails over the received content, or None if all verify."""
    for j, (gid, sig) in enumerate(msg.signatures):
        pk = public_keys.get(gid)
        if pk is None or len(sig) != SIGNATURE_SIZE or not verify(pk, msg.content(j), sig):
            return j
    return None


@dataclass
class ScenarioResult:
    decisions: Dict[int, Order]
    accusations: Dict[int, Set[int]]
    transcript: List[dict]
    rounds: int = 0
    message_count: int = 0
    n: int = 0
    traitors: FrozenSet[int] = frozenset()
    commander_order: Order = Order.ATTACK
    signed: Set[Tuple[int, bytes]] = field(default_factory=set, repr=False)
    messages: List[SignedOrder] = field(default_factory=list, repr=False)

    @property
    def agreement(self) -> bool:
        return len(set(self.decisions.values())) <= 1

    @property
    def validity(self) -> bool:
        if COMMANDER in self.traitors:
            return True
        return all(d == self.commander_order for d in self.decisions.values())

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "traitors": sorted(self.traitors),
            "commander_order": self.commander_order.value,
            "decisions": {str(k): v.value for k, v in sorted(self.decisions.items())},
            "accusations": {str(k): sorted(v) for k, v in sorted(self.accusations.items())},
            "rounds": self.rounds,
            "message_count": self.message_count,
            "agreement": self.agreement,
            "validity": self.validity,
            "transcript": self.transcript,
        }


def traitor_limit(n: int, guard: str | None) -> int:
    if guard == "third":
        return n // 3
    if guard == "classic":
        return n - 1
    if guard is None or guard == "none":
        return n
    raise ValueError(f"unknown guard {guard!r}")


def _invalid_reason(msg: SignedOrder, sender: int, receiver: int, m: int, keys: Mapping[int, bytes]) -> Optional[str]:
    broken = verify_chain_integrity(msg, keys)
    if broken is not None:
        return f"broken-at-{broken}"
    signers = msg.signers
    if msg.session != SESSION:
        return "stale-session"
    if not signers or signers[0] != COMMANDER:
        return "no-commander-signature"
    if len(set(signers)) != len(signers):
        return "duplicate-signer"
    if signers[-1] != sender:
        return "sender-not-last-signer"
    if receiver in signers:
        return "receiver-in-chain"
    if len(signers) > m + 1:
        return "too-deep"
    return None


def _traitor_commander_sends(c: General, order: Order, lieutenants: Sequence[int]) -> List[Tuple[int, SignedOrder]]:
    s = c.strategy
    out = []
    for lid in lieutenants:
        odd = lid % 2 == 1
        if s == ALTER_ORDER:
            out.append((lid, issue_order(c, order.flipped)))
        elif s == SPLIT_ORDERS:
            out.append((lid, issue_order(c, order if odd else order.flipped)))
        elif s == STAY_SILENT:
            pass
        elif s == REPLAY_STALE:
            if odd:
                out.append((lid, issue_order(c, order)))
            else:
                out.append((lid, issue_order(c, order.flipped, SESSION - 1)))
        elif s == SIGN_GARBAGE:
            msg = SignedOrder(order)
            if odd:
                out.append((lid, issue_order(c, order)))
            else:
                out.append((lid, SignedOrder(order, ((c.id, _garbage(c.id, msg)),))))
        else:
            raise ValueError(f"unknown strategy {s!r}")
    return out


def _traitor_relay(g: General, msg: SignedOrder, targets: Iterable[int], stale: SignedOrder) -> List[Tuple[int, SignedOrder]]:
    s = g.strategy
    out = []
    for j in targets:
        if s == ALTER_ORDER:
            out.append((j, sign_and_forward(g, msg, msg.order.flipped)))
        elif s == SPLIT_ORDERS:
            out.append((j, sign_and_forward(g, msg, msg.order if j % 2 == 1 else msg.order.flipped)))
        elif s == STAY_SILENT:
            pass
        elif s == REPLAY_STALE:
            out.append((j, sign_and_forward(g, stale)))
        elif s == SIGN_GARBAGE:
            out.append((j, SignedOrder(msg.order, msg.signatures + ((g.id, _garbage(g.id, msg)),), msg.session)))
        else:
            raise ValueError(f"unknown strategy {s!r}")
    return out


def run_sm(
    n: int,
    traitor_ids: Iterable[int] = (),
    commander_order: Order = Order.ATTACK,
    strategies: Mapping[int, str] | str | None = None,
    m: int | None = None,
    guard: str | None = "third",
) -> ScenarioResult:
    """Signed-message agreement among ``n`` generals.

    ``strategies`` maps traitor id to a strategy name from STRATEGIES (a single
    name applies to every traitor; default alter-order). ``m`` is the relay
    depth bound and defaults to the number of traitors. ``guard`` limits the
    traitor count: "third" allows 3m <= n, "classic" any m < n, None no check.
    """
    if n < 3:
        raise ValueError("need at least three generals")
    traitors = frozenset(traitor_ids)
    if not traitors <= set(range(n)):
        raise ValueError("traitor id out of range")
    if len(traitors) > traitor_limit(n, guard):
        raise TooManyTraitors(f"{len(traitors)} traitors among {n} generals exceeds the {guard} guard")
    if m is None:
        m = len(traitors)
    if isinstance(strategies, str) or strategies is None:
        strategies = {t: strategies or ALTER_ORDER for t in traitors}
    for t in traitors:
        if strategies.get(t, ALTER_ORDER) not in STRATEGIES:
            raise ValueError(f"unknown strategy {strategies[t]!r}")

    signed: Set[Tuple[int, bytes]] = set()
    generals = [
        General(i, general_keys(i), i not in traitors, strategies.get(i, ALTER_ORDER) if i in traitors else None, signed)
        for i in range(n)
    ]
    keys = {g.id: g.keypair.public_key for g in generals}
    commander = generals[COMMANDER]

    # an order the commander legitimately signed in an earlier session
    stale = issue_order(commander, Order(commander_order).flipped, SESSION - 1)
    return _run(generals, keys, Order(commander_order), m, traitors, signed, stale)


def _run(generals, keys, order, m, traitors, signed, stale) -> ScenarioResult:
    n = len(generals)
    lieutenants = list(range(1, n))
    commander = generals[COMMANDER]
    loyal_lts = [i for i in lieutenants if i not in traitors]
    seen: Dict[int, List[Order]] = {i: [] for i in lieutenants}
    accusations: Dict[int, Set[int]] = {i: set() for i in loyal_lts}
    got_direct: Set[int] = set()
    transcript: List[dict] = []
    messages: List[SignedOrder] = []

    if commander.loyal:
        outbox = [(COMMANDER, lid, issue_order(commander, order)) for lid in lieutenants]
    else:
        outbox = [(COMMANDER, lid, msg) for lid, msg in _traitor_commander_sends(commander, order, lieutenants)]

    rnd = 0
    while outbox:
        rnd += 1
        if rnd > m + 1:
            raise RuntimeError("relay exceeded m+1 rounds")
        inbox = sorted(outbox, key=lambda t: (t[1], t[0]))
        outbox = []
        for sender, receiver, msg in inbox:
            messages.append(msg)
            g = generals[receiver]
            reason = _invalid_reason(msg, sender, receiver, m, keys)
            transcript.append({
                "round": rnd,
                "from": sender,
                "to": receiver,
                **msg.to_json(),
                "valid": reason is None,
                "reason": reason,
            })
            if reason is not None:
                if g.loyal:
                    accusations[receiver].add(sender)
                continue
            if sender == COMMANDER:
                got_direct.add(receiver)
            if msg.order in seen[receiver]:
                continue
            seen[receiver].append(msg.order)
            if len(msg.signers) > m:
                continue
            targets = [j for j in lieutenants if j not in msg.signers and j != receiver]
            if g.loyal:
                fwd = sign_and_forward(g, msg)
                outbox.extend((receiver, j, fwd) for j in targets)
            else:
                outbox.extend((receiver, j, out) for j, out in _traitor_relay(g, msg, targets, stale))

    decisions = {}
    for i in loyal_lts:
        values = seen[i]
        decisions[i] = values[0] if len(values) == 1 else DEFAULT_ORDER
        if len(values) > 1 or i not in got_direct:
            accusations[i].add(COMMANDER)
    return ScenarioResult(
        decisions=decisions,
        accusations=accusations,
        transcript=transcript,
        rounds=rnd,
        message_count=len(messages),
        n=n,
        traitors=traitors,
        commander_order=order,
        signed=signed,
        messages=messages,
    )


def run_scenario_a(order: Order = Order.ATTACK, traitor: bool = True) -> ScenarioResult:
    """Loyal commander; lieutenant 2 alters the order it relays (when ``traitor``)."""
    return run_sm(3, {2} if traitor else (), order, {2: ALTER_ORDER})


def run_scenario_b(orders: Tuple[Order, Order] = (Order.ATTACK, Order.RETREAT)) -> ScenarioResult:
    """Commander sends ``orders[0]`` to lieutenant 1 and ``orders[1]`` to lieutenant 2.

    Identical orders make the commander behave loyally.
    """
    first, second = Order(orders[0]), Order(orders[1])
    if first == second:
        return run_sm(3, (), first)
    return run_sm(3, {COMMANDER}, first, {COMMANDER: SPLIT_ORDERS})


def strategy_sweep(n_max: int = 7, m_max: int = 2, guard: str | None = "classic"):
    """Yield every (n, traitors, strategies, order) case up to the given sizes."""
    for n in range(3, n_max + 1):
        for m in range(0, m_max + 1):
            if m > traitor_limit(n, guard):
                continue
            for traitors in itertools.combinations(range(n), m):
                for combo in itertools.product(STRATEGIES, repeat=m):
                    for order in Order:
                        yield n, traitors, dict(zip(traitors, combo)), order


def render_table(result: ScenarioResult) -> str:
    lines = ["round | from -> to | order   | signers      | valid"]
    for t in result.transcript:
        signers = ",".join(str(s) for s in t["signers"])
        mark = "yes" if t["valid"] else f"no ({t['reason']})"
        lines.append(f"{t['round']:>5} | {t['from']:>4} -> {t['to']:<2} | {t['order']:<7} | {signers:<12} | {mark}")
    lines.append("")
    lines.append("lieutenant | decision | accuses")
    for lid in sorted(result.decisions):
        acc = ",".join(str(a) for a in sorted(result.accusations[lid])) or "-"
        lines.append(f"{lid:>10} | {result.decisions[lid].value:<8} | {acc}")
    return "\n".join(lines)
