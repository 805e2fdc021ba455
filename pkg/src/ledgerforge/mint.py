"""Centralized serial-number mint with spend-once semantics.

Every note carries a unique serial. A payee asks the mint whether a serial is
still live; spending marks it spent and issues a fresh serial of equal value to
the payee. The mint is a single point of failure: while ``available`` is False
every query and spend fails.

Notes carry no payer identity.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from typing import Dict, Tuple

from .crypto import Hash256, double_sha256

DEFAULT_SALT = b"ledgerforge-mint-v1"


class MintError(Exception):
    pass


class UnknownSerial(MintError):
    pass


class DoubleSpend(MintError):
    pass


class LedgerUnavailable(MintError):
    pass


class NoteState(str, enum.Enum):
    ISSUED = "issued"
    SPENT = "spent"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class SerialNote:
    serial: Hash256
    value: int
    state: NoteState = NoteState.ISSUED

    def to_json(self) -> dict:
        return {"serial": self.serial.hex(), "value": self.value, "state": self.state.value}


class MintLedger:
    """Issuer ledger. Mutated in place by a single owner."""

    def __init__(self, salt: bytes = DEFAULT_SALT):
        self.salt = salt
        self.notes: Dict[Hash256, SerialNote] = {}
        self.issue_counter = 0
        self.available = True

    def _require_online(self):
        if not self.available:
            raise LedgerUnavailable("mint ledger is unreachable")

    def issue(self, value: int) -> SerialNote:
        if value <= 0:
            raise ValueError("note value must be positive")
        self._require_online()
        serial = double_sha256(self.issue_counter.to_bytes(8, "big") + self.salt)
        self.issue_counter += 1
        # counter is monotone, so a clash means a sha256 collision
        assert serial not in self.notes
        note = SerialNote(serial, value)
        self.notes[serial] = note
        return note

    def spend(self, serial: bytes) -> SerialNote:
        """Retire ``serial`` and return a fresh note of equal value for the payee."""
        self._require_online()
        serial = Hash256(serial)
        note = self.notes.get(serial)
        if note is None:
            raise UnknownSerial(f"serial {serial.hex()} was never issued")
        if note.state is NoteState.SPENT:
            raise DoubleSpend(f"serial {serial.hex()} is already spent")
        self.notes[serial] = replace(note, state=NoteState.SPENT)
        return self.issue(note.value)

    def verify_note(self, serial: bytes) -> NoteState:
        self._require_online()
        note = self.notes.get(Hash256(serial))
        return note.state if note else NoteState.UNKNOWN

    def outstanding_value(self) -> int:
        return sum(n.value for n in self.notes.values() if n.state is NoteState.ISSUED)


def issue(ledger: MintLedger, value: int) -> Tuple[MintLedger, SerialNote]:
    return ledger, ledger.issue(value)


def spend(ledger: MintLedger, serial: bytes) -> Tuple[MintLedger, SerialNote]:
    return ledger, ledger.spend(serial)


def verify_note(ledger: MintLedger, serial: bytes) -> NoteState:
    return ledger.verify_note(serial)


def demo_transcript(value: int = 10, salt: bytes = DEFAULT_SALT) -> list:
    """Scripted issue -> verify -> spend -> double-spend run, as JSON-ready events."""
    ledger = MintLedger(salt)
    events = []
    note = ledger.issue(value)
    events.append({"step": "issue", "note": note.to_json()})
    events.append({"step": "verify", "serial": note.serial.hex(), "status": ledger.verify_note(note.serial).value})
    fresh = ledger.spend(note.serial)
    events.append({"step": "spend", "serial": note.serial.hex(), "ok": True, "fresh_note": fresh.to_json()})
    events.append({"step": "verify", "serial": note.serial.hex(), "status": ledger.verify_note(note.serial).value})
    try:
        ledger.spend(note.serial)
    except DoubleSpend as exc:
        events.append({"step": "spend", "serial": note.serial.hex(), "ok": False, "error": "DoubleSpend", "detail": str(exc)})
    events.append({"step": "verify", "serial": fresh.serial.hex(), "status": ledger.verify_note(fresh.serial).value})
    return events
