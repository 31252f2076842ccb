"""Writer for the TREFFEMB v1 wire format consumed by the treff toolkit.

Layout (little-endian): 8-byte magic "TREFFEMB", u32 version=1, u32 rows,
u32 dim, u8 flags (bit0 = has labels), rows*dim float32 row-major, then if
labeled: rows u32 class ids, u32 n, and n (u32 length, UTF-8 name) entries.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

MAGIC = b"TREFFEMB"
VERSION = 1
_HEADER = struct.Struct("<8sIIIB")


def write_treffemb(
    data: np.ndarray,
    path: str | Path,
    labels: list[int] | None = None,
    class_names: list[str] | None = None,
) -> None:
    data = np.asarray(data, dtype=np.float64)
    if data.ndim != 2 or data.shape[0] < 1 or data.shape[1] < 1:
        raise ValueError(f"need a non-empty 2-D matrix, got shape {data.shape}")
    if not np.all(np.isfinite(data)):
        raise ValueError("embeddings contain non-finite values")
    if (labels is None) != (class_names is None):
        raise ValueError("labels and class_names must be given together")
    if class_names is not None:
        if len(set(class_names)) != len(class_names) or any(not n for n in class_names):
            raise ValueError("class names must be unique and non-empty")
        if len(labels) != data.shape[0]:
            raise ValueError(f"expected {data.shape[0]} labels, got {len(labels)}")
        if any(c < 0 or c >= len(class_names) for c in labels):
            raise ValueError("class id out of range")

    flags = 1 if labels is not None else 0
    parts = [_HEADER.pack(MAGIC, VERSION, data.shape[0], data.shape[1], flags)]
    parts.append(data.astype("<f4").tobytes())
    if labels is not None:
        parts.append(np.asarray(labels, dtype="<u4").tobytes())
        parts.append(struct.pack("<I", len(class_names)))
        for name in class_names:
            raw = name.encode("utf-8")
            parts.append(struct.pack("<I", len(raw)) + raw)
    Path(path).write_bytes(b"".join(parts))
