"""Embedding containers, label vocabularies, and the TREFFEMB binary file format.

TREFFEMB v1 layout (little-endian):
    magic    8 bytes ASCII "TREFFEMB"
    version  u32 = 1
    rows     u32
    dim      u32
    flags    u8  (bit 0: has_labels)
    payload  rows * dim float32, row-major
    if has_labels:
        rows * u32 class ids
        u32 n, then n entries of (u32 byte length, UTF-8 class name)

Scalars are stored as 32-bit floats; in-memory math uses float64. Files
written from identical inputs are byte-identical.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

MAGIC = b"TREFFEMB"
VERSION = 1
_HEADER = struct.Struct("<8sIIIB")  # magic, version, rows, dim, flags


class FormatError(ValueError):
    """Raised when a TREFFEMB file is malformed or truncated."""


@dataclass(frozen=True)
class EmbeddingSet:
    """A rows x dim matrix of finite real embeddings, one row per item."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=np.float64)
        if arr.ndim != 2:
            raise ValueError(f"embedding data must be 2-D, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"embedding matrix must be at least 1x1, got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("embedding data contains NaN or Inf")
        arr = np.ascontiguousarray(arr)
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def dim(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class ClassVocabulary:
    """Ordered, unique class names; list index is the class id."""

    names: tuple[str, ...]

    def __post_init__(self):
        names = tuple(self.names)
        if not names:
            raise ValueError("vocabulary must contain at least one class")
        if any(not n for n in names):
            raise ValueError("class names must be non-empty")
        if len(set(names)) != len(names):
            raise ValueError("class names must be unique")
        object.__setattr__(self, "names", names)

    @property
    def size(self) -> int:
        return len(self.names)

    def index_of(self, name: str) -> int:
        return self.names.index(name)


@dataclass(frozen=True)
class SupportSet:
    """Labeled embeddings: one class id per row, ids indexing into vocab."""

    embeddings: EmbeddingSet
    labels: np.ndarray
    vocab: ClassVocabulary

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64)
        if labels.ndim != 1 or labels.shape[0] != self.embeddings.rows:
            raise ValueError(
                f"labels must be 1-D with length {self.embeddings.rows}, "
                f"got shape {labels.shape}"
            )
        if labels.size and (labels.min() < 0 or labels.max() >= self.vocab.size):
            raise ValueError(f"class ids must lie in [0, {self.vocab.size})")
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)

    @property
    def n_classes(self) -> int:
        return self.vocab.size


def one_hot(labels: np.ndarray, n: int) -> np.ndarray:
    """Encode class ids as a (len(labels), n) 0/1 matrix, one 1 per row."""
    labels = np.asarray(labels, dtype=np.int64)
    if labels.size and (labels.min() < 0 or labels.max() >= n):
        raise ValueError(f"class ids must lie in [0, {n})")
    out = np.zeros((labels.shape[0], n), dtype=np.float64)
    out[np.arange(labels.shape[0]), labels] = 1.0
    return out


def write_embeddings(
    emb: EmbeddingSet,
    path: str | Path,
    labels: np.ndarray | None = None,
    vocab: ClassVocabulary | None = None,
) -> None:
    """Write a TREFFEMB v1 file. Labels and vocab come together or not at all."""
    if (labels is None) != (vocab is None):
        raise ValueError("labels and vocab must be given together")
    if labels is not None:
        labels = np.asarray(labels, dtype=np.int64)
        if labels.shape != (emb.rows,):
            raise ValueError(f"expected {emb.rows} labels, got {labels.shape}")
        if labels.min() < 0 or labels.max() >= vocab.size:
            raise ValueError(f"class ids must lie in [0, {vocab.size})")

    flags = 1 if labels is not None else 0
    parts = [_HEADER.pack(MAGIC, VERSION, emb.rows, emb.dim, flags)]
    parts.append(emb.data.astype("<f4").tobytes())
    if labels is not None:
        parts.append(labels.astype("<u4").tobytes())
        parts.append(struct.pack("<I", vocab.size))
        for name in vocab.names:
            raw = name.encode("utf-8")
            parts.append(struct.pack("<I", len(raw)) + raw)
    Path(path).write_bytes(b"".join(parts))


def read_embeddings(
    path: str | Path,
) -> tuple[EmbeddingSet, np.ndarray | None, ClassVocabulary | None]:
    """Read a TREFFEMB v1 file; exact inverse of write_embeddings."""
    blob = Path(path).read_bytes()
    if len(blob) < _HEADER.size:
        raise FormatError(f"{path}: file shorter than header")
    magic, version, rows, dim, flags = _HEADER.unpack_from(blob)
    if magic != MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise FormatError(f"{path}: unsupported version {version}")
    offset = _HEADER.size

    n_payload = rows * dim
    end = offset + 4 * n_payload
    if len(blob) < end:
        raise FormatError(f"{path}: truncated payload")
    data = np.frombuffer(blob, dtype="<f4", count=n_payload, offset=offset)
    data = data.reshape(rows, dim)
    if not np.all(np.isfinite(data)):
        raise FormatError(f"{path}: payload contains non-finite values")
    emb = EmbeddingSet(data)
    offset = end

    if not flags & 1:
        return emb, None, None

    end = offset + 4 * rows
    if len(blob) < end:
        raise FormatError(f"{path}: truncated label block")
    labels = np.frombuffer(blob, dtype="<u4", count=rows, offset=offset)
    labels = labels.astype(np.int64)
    offset = end

    if len(blob) < offset + 4:
        raise FormatError(f"{path}: truncated vocabulary count")
    (n,) = struct.unpack_from("<I", blob, offset)
    offset += 4
    names = []
    for _ in range(n):
        if len(blob) < offset + 4:
            raise FormatError(f"{path}: truncated vocabulary entry")
        (length,) = struct.unpack_from("<I", blob, offset)
        offset += 4
        if len(blob) < offset + length:
            raise FormatError(f"{path}: truncated class name")
        names.append(blob[offset : offset + length].decode("utf-8"))
        offset += length
    vocab = ClassVocabulary(tuple(names))
    if labels.size and labels.max() >= vocab.size:
        raise FormatError(f"{path}: class id out of vocabulary range")
    return emb, labels, vocab
