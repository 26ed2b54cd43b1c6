"""Self-describing binary container for named float32 arrays.

Byte layout (all integers little-endian; documented in
``docs/checkpoint-format.md``):

    bytes 0-3    magic ``b"ACTC"``
    bytes 4-7    format version, uint32 (currently 1)
    bytes 8-15   index length in bytes, uint64
    index        UTF-8 JSON: {"metadata": {...}, "tensors": [entry...]}
    payload      concatenated raw little-endian float32 data

Each index entry is ``{"name", "shape", "dtype", "offset", "nbytes"}``
with ``offset`` relative to payload start and ``dtype`` always ``"<f4"``.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from ..errors import AutocurriculaError

MAGIC = b"ACTC"
VERSION = 1


class ContainerError(AutocurriculaError):
    pass


def write_container(path, arrays: dict[str, np.ndarray], metadata: dict | None = None) -> None:
    entries = []
    payload = bytearray()
    for name in sorted(arrays):
        data = np.ascontiguousarray(arrays[name], dtype="<f4")
        entries.append(
            {
                "name": name,
                "shape": list(data.shape),
                "dtype": "<f4",
                "offset": len(payload),
                "nbytes": data.nbytes,
            }
        )
        payload += data.tobytes()
    index = json.dumps({"metadata": metadata or {}, "tensors": entries}).encode("utf-8")
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<I", VERSION))
        f.write(struct.pack("<Q", len(index)))
        f.write(index)
        f.write(bytes(payload))


def read_container(path) -> tuple[dict[str, np.ndarray], dict]:
    raw = Path(path).read_bytes()
    if raw[:4] != MAGIC:
        raise ContainerError(f"{path}: bad magic {raw[:4]!r}")
    (version,) = struct.unpack("<I", raw[4:8])
    if version != VERSION:
        raise ContainerError(f"{path}: unsupported container version {version}")
    (index_len,) = struct.unpack("<Q", raw[8:16])
    index = json.loads(raw[16 : 16 + index_len].decode("utf-8"))
    payload = raw[16 + index_len :]
    arrays = {}
    for entry in index["tensors"]:
        start = entry["offset"]
        flat = np.frombuffer(payload, dtype="<f4", count=entry["nbytes"] // 4, offset=start)
        arrays[entry["name"]] = flat.reshape(entry["shape"]).copy()
    return arrays, index["metadata"]
