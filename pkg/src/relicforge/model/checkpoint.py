"""Versioned binary checkpoint container.

Layout, all integers little-endian u32: magic "RLFM", format version,
length-prefixed config JSON, a shape table (tensor count, then per tensor
a length-prefixed name, rank, and dims), the raw float64 little-endian
parameter blobs in table order, and a length-prefixed history JSON
trailer. Loading verifies the table against the config before touching
the blobs, so a corrupted or truncated file fails fast instead of
yielding a silently misshapen model.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from relicforge.errors import FormatError
from relicforge.model.network import ModelCheckpoint, ModelConfig, tensor_shapes

MAGIC = b"RLFM"
VERSION = 1


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, count: int) -> bytes:
        if count < 0 or self.pos + count > len(self.data):
            raise FormatError("truncated checkpoint")
        out = self.data[self.pos:self.pos + count]
        self.pos += count
        return out

    def u32(self) -> int:
        return struct.unpack("<I", self.take(4))[0]

    def text(self) -> str:
        raw = self.take(self.u32())
        try:
            return raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise FormatError("corrupted text field") from exc

    def done(self) -> bool:
        return self.pos == len(self.data)


def save(ckpt: ModelCheckpoint, path: Path | str) -> None:
    ckpt.validate()
    buf = bytearray()
    buf += MAGIC
    buf += struct.pack("<I", VERSION)

    config = json.dumps(ckpt.config.to_json(), separators=(",", ":")).encode("utf-8")
    buf += struct.pack("<I", len(config)) + config

    table = tensor_shapes(ckpt.config)
    buf += struct.pack("<I", len(table))
    for name, shape in table:
        encoded = name.encode("utf-8")
        buf += struct.pack("<I", len(encoded)) + encoded
        buf += struct.pack("<I", len(shape))
        buf += struct.pack(f"<{len(shape)}I", *shape)
    for name, _shape in table:
        buf += np.ascontiguousarray(ckpt.params[name], dtype="<f8").tobytes()

    history = json.dumps(ckpt.history, separators=(",", ":")).encode("utf-8")
    buf += struct.pack("<I", len(history)) + history

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(bytes(buf))


def load(path: Path | str) -> ModelCheckpoint:
    reader = _Reader(Path(path).read_bytes())
    if reader.take(4) != MAGIC:
        raise FormatError("not a checkpoint file (bad magic)")
    version = reader.u32()
    if version != VERSION:
        raise FormatError(f"unsupported checkpoint version {version}")

    try:
        config = ModelConfig.from_json(json.loads(reader.text()))
        config.validate()
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"corrupted config: {exc}") from exc

    expected = tensor_shapes(config)
    count = reader.u32()
    if count != len(expected):
        raise FormatError(
            f"corrupted shape table: {count} tensors, config implies {len(expected)}"
        )
    for name, shape in expected:
        found = reader.text()
        rank = reader.u32()
        if rank > 4:
            raise FormatError(f"corrupted shape table: rank {rank} for {found}")
        dims = tuple(reader.u32() for _ in range(rank))
        if found != name or dims != shape:
            raise FormatError(
                f"corrupted shape table: expected {name}{shape}, found {found}{dims}"
            )

    params: dict[str, np.ndarray] = {}
    for name, shape in expected:
        size = 8 * int(np.prod(shape, dtype=np.int64)) if shape else 8
        raw = reader.take(size)
        params[name] = np.frombuffer(raw, dtype="<f8").reshape(shape).copy()

    try:
        history = json.loads(reader.text())
    except ValueError as exc:
        raise FormatError(f"corrupted history: {exc}") from exc
    if not reader.done():
        raise FormatError("trailing bytes after the checkpoint payload")

    ckpt = ModelCheckpoint(config, params, history)
    try:
        ckpt.validate()
    except ValueError as exc:
        raise FormatError(str(exc)) from exc
    return ckpt
