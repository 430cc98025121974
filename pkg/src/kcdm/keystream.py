"""Subkey derivation and deterministic keyed byte/uniform streams.

Everything random in this library is drawn from a KeyedStream: SHA-256 in
counter mode over a 32-byte subkey. Block i of the stream is
SHA-256(subkey || LE64(i)), so the stream prefix is a pure function of
(subkey, bytes consumed) and is bitwise identical across runs, platforms and
thread counts. Stock generators are deliberately not used anywhere.

Normative byte layout (shared by every implementation of these formats):
domain labels are ASCII with no terminator, the block counter is
little-endian 64-bit, u64 draws are little-endian, and unit uniforms are
(u64 >> 11) * 2**-53 so every output is an exactly representable binary64
in [0, 1).
"""

from __future__ import annotations

import hashlib
import math
import struct
from dataclasses import dataclass

import numpy as np

from .errors import InvalidKeyMaterial, InvalidRange, StreamExhausted

KEY_LEN = 32
NONCE_LEN = 16

_SUBKEY_LABELS = ("graph", "params", "init", "noise")
_U64_SPAN = 1 << 64
_UNIT_SCALE = 2.0 ** -53


def _check_len(name: str, data: bytes, expected: int) -> bytes:
    if not isinstance(data, (bytes, bytearray)):
        raise InvalidKeyMaterial(f"{name} must be bytes, got {type(data).__name__}")
    if len(data) != expected:
        raise InvalidKeyMaterial(f"{name} must be {expected} bytes, got {len(data)}")
    return bytes(data)


class MasterKey:
    """32-byte opaque secret. Never serialized into any output container."""

    __slots__ = ("bytes",)

    def __init__(self, data: bytes):
        self.bytes = _check_len("key", data, KEY_LEN)

    @classmethod
    def from_hex(cls, text: str) -> "MasterKey":
        try:
            raw = bytes.fromhex(text)
        except ValueError as exc:
            raise InvalidKeyMaterial(f"key is not valid hex: {exc}") from exc
        return cls(raw)

    def __repr__(self) -> str:  # never leak key bytes through repr/logs
        return "MasterKey(<32 bytes>)"


class Nonce:
    """16-byte public value, stored in clear in container headers."""

    __slots__ = ("bytes",)

    def __init__(self, data: bytes):
        self.bytes = _check_len("nonce", data, NONCE_LEN)

    @classmethod
    def from_hex(cls, text: str) -> "Nonce":
        try:
            raw = bytes.fromhex(text)
        except ValueError as exc:
            raise InvalidKeyMaterial(f"nonce is not valid hex: {exc}") from exc
        return cls(raw)

    def hex(self) -> str:
        return self.bytes.hex()

    def __repr__(self) -> str:
        return f"Nonce({self.bytes.hex()})"


@dataclass(frozen=True)
class SubKeys:
    """The four domain-separated 32-byte subkeys."""

    graph: bytes
    params: bytes
    init: bytes
    noise: bytes


def derive_subkeys(key: MasterKey, nonce: Nonce) -> SubKeys:
    """Derive graph/params/init/noise subkeys.

    Each is SHA-256 over the exact concatenation ASCII(label) || key || nonce
    with no separators or length prefixes.
    """
    if not isinstance(key, MasterKey):
        key = MasterKey(key)
    if not isinstance(nonce, Nonce):
        nonce = Nonce(nonce)
    digests = [
        hashlib.sha256(label.encode("ascii") + key.bytes + nonce.bytes).digest()
        for label in _SUBKEY_LABELS
    ]
    return SubKeys(*digests)


class KeyedStream:
    """Deterministic byte stream: block i is SHA-256(subkey || LE64(i)).

    Single-owner mutable state; safe to move between threads, not safe for
    unsynchronized sharing.
    """

    __slots__ = ("_subkey", "_counter", "_buffer")

    def __init__(self, subkey: bytes):
        if len(subkey) != KEY_LEN:
            raise InvalidKeyMaterial(f"subkey must be {KEY_LEN} bytes, got {len(subkey)}")
        self._subkey = bytes(subkey)
        self._counter = 0
        self._buffer = b""

    def take(self, n: int) -> bytes:
        """Consume exactly n bytes of the stream."""
        if n <= len(self._buffer):
            out, self._buffer = self._buffer[:n], self._buffer[n:]
            return out
        chunks = [self._buffer]
        have = len(self._buffer)
        prefix = self._subkey
        counter = self._counter
        while have < n:
            if counter >= _U64_SPAN:
                raise StreamExhausted("keyed stream block counter overflowed")
            chunks.append(hashlib.sha256(prefix + struct.pack("<Q", counter)).digest())
            counter += 1
            have += 32
        self._counter = counter
        data = b"".join(chunks)
        out, self._buffer = data[:n], data[n:]
        return out

    def next_u64(self) -> int:
        """Next 8 stream bytes, little-endian decoded."""
        return int.from_bytes(self.take(8), "little")

    def unit_uniform(self) -> float:
        """Uniform in [0, 1) with exactly 53 bits of entropy."""
        return (self.next_u64() >> 11) * _UNIT_SCALE

    def uniform(self, a: float, b: float) -> float:
        """Uniform in [a, b); monotone in the underlying unit draw."""
        if not (math.isfinite(a) and math.isfinite(b)) or a >= b:
            raise InvalidRange(f"need finite a < b, got [{a}, {b})")
        return a + (b - a) * self.unit_uniform()

    def index(self, m: int) -> int:
        """Unbiased integer in [0, m) via rejection sampling on u64 draws."""
        if m < 1:
            raise InvalidRange(f"modulus must be >= 1, got {m}")
        limit = (_U64_SPAN // m) * m
        while True:
            u = self.next_u64()
            if u < limit:
                return u % m

    def unit_block(self, count: int) -> np.ndarray:
        """count unit uniforms as a float64 array.

        Bitwise identical to count successive unit_uniform() calls; exists so
        bulk consumers (weights, noise, init) avoid per-draw overhead.
        """
        raw = self.take(8 * count)
        u = np.frombuffer(raw, dtype="<u8")
        return (u >> np.uint64(11)).astype(np.float64) * _UNIT_SCALE

    def uniform_block(self, count: int, a: float, b: float) -> np.ndarray:
        """count uniforms in [a, b), bitwise identical to repeated uniform()."""
        if not (math.isfinite(a) and math.isfinite(b)) or a >= b:
            raise InvalidRange(f"need finite a < b, got [{a}, {b})")
        return a + (b - a) * self.unit_block(count)


def stream_for(subkey: bytes) -> KeyedStream:
    return KeyedStream(subkey)
