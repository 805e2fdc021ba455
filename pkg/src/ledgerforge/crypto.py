"""Hashing, difficulty targets, Ed25519 keys and address derivation.

Hex rendering everywhere in the package is lowercase without a ``0x`` prefix;
only human-facing CLI tables add the prefix.
"""
from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass, field

from cryptography.exceptions import InvalidSignature
from cryptography.hazmat.primitives.asymmetric.ed25519 import (
    Ed25519PrivateKey,
    Ed25519PublicKey,
)
from cryptography.hazmat.primitives.serialization import (
    Encoding,
    NoEncryption,
    PrivateFormat,
    PublicFormat,
)

HASH_SIZE = 32
ADDRESS_SIZE = 20
PUBLIC_KEY_SIZE = 32
SIGNATURE_SIZE = 64
MAX_THRESHOLD = 1 << 256


class Hash256(bytes):
    """A 32-byte digest. Compares byte-wise like any ``bytes``."""

    def __new__(cls, value: bytes | bytearray = b"\x00" * HASH_SIZE):
        if len(value) != HASH_SIZE:
            raise ValueError(f"Hash256 needs {HASH_SIZE} bytes, got {len(value)}")
        return super().__new__(cls, value)

    @classmethod
    def fromhex(cls, text: str) -> "Hash256":
        if text.startswith("0x"):
            text = text[2:]
        if len(text) != 2 * HASH_SIZE:
            raise ValueError(f"expected 64 hex digits, got {len(text)}")
        return cls(bytes.fromhex(text))

    @classmethod
    def zero(cls) -> "Hash256":
        return cls(b"\x00" * HASH_SIZE)

    def __int__(self) -> int:
        return int.from_bytes(self, "big")

    def __str__(self) -> str:
        return self.hex()

    def __repr__(self) -> str:
        return f"Hash256({self.hex()[:16]}…)"


ZERO_HASH = Hash256.zero()


class Address(bytes):
    """First 20 bytes of sha256(public key)."""

    def __new__(cls, value: bytes | bytearray):
        if len(value) != ADDRESS_SIZE:
            raise ValueError(f"Address needs {ADDRESS_SIZE} bytes, got {len(value)}")
        return super().__new__(cls, value)

    @classmethod
    def fromhex(cls, text: str) -> "Address":
        if text.startswith("0x"):
            text = text[2:]
        return cls(bytes.fromhex(text))

    def __str__(self) -> str:
        return self.hex()

    def __repr__(self) -> str:
        return f"Address({self.hex()})"


ZERO_ADDRESS = Address(b"\x00" * ADDRESS_SIZE)


def sha256(data: bytes) -> Hash256:
    return Hash256(hashlib.sha256(data).digest())


def double_sha256(data: bytes) -> Hash256:
    return Hash256(hashlib.sha256(hashlib.sha256(data).digest()).digest())


def leading_hex_zeros(h: bytes) -> int:
    text = h.hex()
    return len(text) - len(text.lstrip("0"))


@dataclass(frozen=True)
class DifficultyTarget:
    """A hash meets the target iff its big-endian integer value is below ``threshold``."""

    threshold: int

    def __post_init__(self):
        if not 0 < self.threshold <= MAX_THRESHOLD:
            raise ValueError("threshold must lie in (0, 2**256]")

    @classmethod
    def from_zeros(cls, k: int) -> "DifficultyTarget":
        if not 0 <= k <= 64:
            raise ValueError(f"leading zero count must be in [0, 64], got {k}")
        return cls(1 << (256 - 4 * k))

    @property
    def leading_hex_zeros(self) -> int:
        # floor((256 - log2(threshold)) / 4); exact for thresholds built by from_zeros
        return (257 - self.threshold.bit_length()) // 4

    @property
    def threshold_bytes(self) -> bytes | None:
        """Threshold as 32 big-endian bytes, or None when every hash meets it."""
        if self.threshold == MAX_THRESHOLD:
            return None
        return self.threshold.to_bytes(HASH_SIZE, "big")

    def meets(self, h: bytes) -> bool:
        return int.from_bytes(h, "big") < self.threshold

    @property
    def work(self) -> int:
        """Expected number of hashes to meet this target."""
        return MAX_THRESHOLD // self.threshold

    def hex(self) -> str:
        return format(self.threshold, "x")

    @classmethod
    def fromhex(cls, text: str) -> "DifficultyTarget":
        return cls(int(text, 16))


@dataclass(frozen=True)
class KeyPair:
    private_key: Ed25519PrivateKey = field(repr=False)
    public_key: bytes

    @property
    def address(self) -> Address:
        return derive_address(self.public_key)

    @property
    def seed(self) -> bytes:
        return self.private_key.private_bytes(
            Encoding.Raw, PrivateFormat.Raw, NoEncryption()
        )

    def sign(self, message: bytes) -> bytes:
        return sign(self.private_key, message)


def generate_keypair(seed: bytes | None = None) -> KeyPair:
    """Ed25519 key pair; deterministic when a 32-byte ``seed`` is supplied."""
    if seed is None:
        seed = os.urandom(32)
    if len(seed) != 32:
        raise ValueError(f"seed must be exactly 32 bytes, got {len(seed)}")
    sk = Ed25519PrivateKey.from_private_bytes(bytes(seed))
    pk = sk.public_key().public_bytes(Encoding.Raw, PublicFormat.Raw)
    return KeyPair(sk, pk)


def keypair_from_label(label: str) -> KeyPair:
    """Deterministic key pair for named test/sim actors."""
    return generate_keypair(hashlib.sha256(label.encode()).digest())


def derive_address(public_key: bytes) -> Address:
    return Address(hashlib.sha256(public_key).digest()[:ADDRESS_SIZE])


def sign(private_key: Ed25519PrivateKey | KeyPair, message: bytes) -> bytes:
    if isinstance(private_key, KeyPair):
        private_key = private_key.private_key
    return private_key.sign(message)


def verify(public_key: bytes, message: bytes, sig: bytes) -> bool:
    """True iff ``sig`` is a valid signature of ``message`` under ``public_key``.

    Raises ValueError for a public key or signature of the wrong length.
    """
    if len(public_key) != PUBLIC_KEY_SIZE:
        raise ValueError(f"public key must be {PUBLIC_KEY_SIZE} bytes")
    if len(sig) != SIGNATURE_SIZE:
        raise ValueError(f"signature must be {SIGNATURE_SIZE} bytes")
    try:
        Ed25519PublicKey.from_public_bytes(bytes(public_key)).verify(bytes(sig), message)
    except (InvalidSignature, ValueError):
        return False
    return True
