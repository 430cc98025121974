"""Bit-exact binary formats for plain tensors and masked containers.

Both formats are normative to the byte and little-endian throughout, so a
file produced on any platform parses on any other bit-exactly. v1 carries
binary64 payloads only; widening goes through the version field.

Tensor file ("KTEN"):
    magic 4B | version u16 | rank u8 | dims rank*u64 | payload binary64*prod

Masked container ("KCDM"):
    magic 4B | version u16 | nonce 16B | fingerprint 8B | options 87B
    | rank u8 | dims rank*u64 | payload binary64*prod

Options block (87 bytes):
    map u8 (0=auto, 1..5 registry order) | family u8 (0=auto, 1=ER, 2=WS)
    | pin flags u8 (bit0..7 = r, mu, s, K, p, k, beta, eps_c)
    | 8 pinned binary64 values (zero when unpinned)
    | t_burn u32 | sigma binary64 | alpha binary64

The fingerprint is SHA-256(options block), first 8 bytes: it commits the
public configuration only, never key material or key-derived samples. The
nonce is public by design and stored in clear.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass

import numpy as np

from .errors import CorruptFile, UnsupportedFormat, UnsupportedVersion

TENSOR_MAGIC = b"KTEN"
CONTAINER_MAGIC = b"KCDM"
FORMAT_VERSION = 1

OPTIONS_BLOCK_LEN = 87
PIN_FIELDS = ("r", "mu", "s", "K", "p", "k", "beta", "eps_c")

_MAX_RANK = 255


@dataclass(frozen=True)
class ContainerMeta:
    """Public header of a masked container."""

    nonce: bytes
    fingerprint: bytes
    options_block: bytes


def fingerprint_of(options_block: bytes) -> bytes:
    return hashlib.sha256(options_block).digest()[:8]


def _pack_dims(shape: tuple[int, ...]) -> bytes:
    if len(shape) > _MAX_RANK:
        raise CorruptFile(f"rank {len(shape)} exceeds format maximum {_MAX_RANK}")
    return struct.pack("<B", len(shape)) + b"".join(struct.pack("<Q", n) for n in shape)


class _Reader:
    """Bounds-checked cursor; every short read is a typed CorruptFile."""

    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int, what: str) -> bytes:
        if self.pos + n > len(self.data):
            raise CorruptFile(f"truncated while reading {what}")
        out = self.data[self.pos : self.pos + n]
        self.pos += n
        return out

    def u8(self, what: str) -> int:
        return self.take(1, what)[0]

    def u16(self, what: str) -> int:
        return struct.unpack("<H", self.take(2, what))[0]

    def u64(self, what: str) -> int:
        return struct.unpack("<Q", self.take(8, what))[0]

    def rest(self) -> bytes:
        out = self.data[self.pos :]
        self.pos = len(self.data)
        return out


def _read_header(r: _Reader, magic: bytes) -> None:
    got = r.take(4, "magic")
    if got != magic:
        raise UnsupportedFormat(f"bad magic {got!r}, expected {magic!r}")
    version = r.u16("version")
    if version > FORMAT_VERSION:
        raise UnsupportedVersion(f"version {version} is newer than supported {FORMAT_VERSION}")
    if version != FORMAT_VERSION:
        raise CorruptFile(f"version must be {FORMAT_VERSION}, got {version}")


def _read_payload(r: _Reader) -> np.ndarray:
    rank = r.u8("rank")
    shape = tuple(r.u64(f"dim {i}") for i in range(rank))
    count = 1
    for n in shape:
        if n > 1 << 48:  # cannot index such an axis; reject before reshape
            raise CorruptFile(f"dimension {n} is implausibly large")
        count *= n
    payload = r.rest()
    # Length check happens before any allocation so fuzzed dims cannot
    # trigger huge buffers.
    if len(payload) != 8 * count:
        raise CorruptFile(
            f"payload is {len(payload)} bytes, dims require {8 * count}"
        )
    values = np.frombuffer(payload, dtype="<f8").copy()
    return values.reshape(shape)


def tensor_bytes(x: np.ndarray) -> bytes:
    x = np.ascontiguousarray(x, dtype=np.float64)
    return (
        TENSOR_MAGIC
        + struct.pack("<H", FORMAT_VERSION)
        + _pack_dims(x.shape)
        + x.tobytes()
    )


def write_tensor(path, x: np.ndarray) -> None:
    with open(path, "wb") as fh:
        fh.write(tensor_bytes(x))


def parse_tensor(data: bytes) -> np.ndarray:
    r = _Reader(data)
    _read_header(r, TENSOR_MAGIC)
    return _read_payload(r)


def read_tensor(path) -> np.ndarray:
    with open(path, "rb") as fh:
        return parse_tensor(fh.read())


def container_bytes(masked: np.ndarray, nonce: bytes, options_block: bytes) -> bytes:
    if len(nonce) != 16:
        raise CorruptFile(f"nonce must be 16 bytes, got {len(nonce)}")
    if len(options_block) != OPTIONS_BLOCK_LEN:
        raise CorruptFile(
            f"options block must be {OPTIONS_BLOCK_LEN} bytes, got {len(options_block)}"
        )
    masked = np.ascontiguousarray(masked, dtype=np.float64)
    return (
        CONTAINER_MAGIC
        + struct.pack("<H", FORMAT_VERSION)
        + nonce
        + fingerprint_of(options_block)
        + options_block
        + _pack_dims(masked.shape)
        + masked.tobytes()
    )


def write_container(path, masked: np.ndarray, nonce: bytes, options_block: bytes) -> None:
    with open(path, "wb") as fh:
        fh.write(container_bytes(masked, nonce, options_block))


def parse_container(data: bytes) -> tuple[np.ndarray, ContainerMeta]:
    r = _Reader(data)
    _read_header(r, CONTAINER_MAGIC)
    nonce = r.take(16, "nonce")
    fingerprint = r.take(8, "fingerprint")
    options_block = r.take(OPTIONS_BLOCK_LEN, "options block")
    values = _read_payload(r)
    return values, ContainerMeta(nonce=nonce, fingerprint=fingerprint, options_block=options_block)


def read_container(path) -> tuple[np.ndarray, ContainerMeta]:
    with open(path, "rb") as fh:
        return parse_container(fh.read())


def read_csv(path) -> np.ndarray:
    """Rectangular CSV of decimal floats -> rank-2 tensor."""
    rows = []
    with open(path, "r", encoding="ascii") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rows.append([float(cell) for cell in line.split(",")])
            except ValueError as exc:
                raise CorruptFile(f"bad CSV value on line {lineno}: {exc}") from exc
    if not rows:
        raise CorruptFile("CSV contains no rows")
    width = len(rows[0])
    if any(len(row) != width for row in rows):
        raise CorruptFile("CSV rows have unequal lengths")
    return np.array(rows, dtype=np.float64)


def write_csv(path, x: np.ndarray) -> None:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        x = x[None, :]
    if x.ndim != 2:
        raise CorruptFile(f"CSV export supports rank 1 or 2, got rank {x.ndim}")
    with open(path, "w", encoding="ascii") as fh:
        for row in x:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")
