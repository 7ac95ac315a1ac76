"""Shared binary plumbing for model files.

All integers are little-endian and fixed-width; floats are 64-bit IEEE.
Both model formats embed their vocabularies so a saved model is enough to
encode raw source files.
"""

from __future__ import annotations

import struct

from .corpus import UNK_TOKEN, LabelVocabulary, Vocabulary
from .errors import ModelIoError


class Reader:
    """Bounds-checked cursor over a byte string."""

    def __init__(self, data: bytes, name: str = "model file"):
        self.data = data
        self.pos = 0
        self.name = name

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise ModelIoError(f"{self.name} is truncated")
        chunk = self.data[self.pos : self.pos + n]
        self.pos += n
        return chunk

    def unpack(self, fmt: str):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))

    def expect_end(self) -> None:
        if self.pos != len(self.data):
            raise ModelIoError(f"{self.name} has {len(self.data) - self.pos} trailing bytes")


def pack_vocab(vocab: Vocabulary) -> bytes:
    parts = [struct.pack("<II", len(vocab.tokens), vocab.min_count)]
    for token, count in zip(vocab.tokens, vocab.counts):
        blob = token.encode("utf-8")
        parts.append(struct.pack("<QI", count, len(blob)))
        parts.append(blob)
    return b"".join(parts)


def unpack_vocab(reader: Reader) -> Vocabulary:
    n, min_count = reader.unpack("<II")
    tokens = []
    counts = []
    for _ in range(n):
        count, blob_len = reader.unpack("<QI")
        try:
            tokens.append(reader.take(blob_len).decode("utf-8"))
        except UnicodeDecodeError as exc:
            raise ModelIoError(f"{reader.name} has a bad vocabulary entry") from exc
        counts.append(count)
    if not tokens or tokens[0] != UNK_TOKEN:
        raise ModelIoError(f"{reader.name} vocabulary must start with {UNK_TOKEN!r}")
    return Vocabulary(tuple(tokens), tuple(counts), min_count)


def pack_label_vocab(labels: LabelVocabulary) -> bytes:
    parts = [struct.pack("<II", len(labels.labels), labels.fallback_id)]
    for (newlines, horizontal), count in zip(labels.labels, labels.counts):
        parts.append(struct.pack("<BBQ", newlines, horizontal, count))
    return b"".join(parts)


def unpack_label_vocab(reader: Reader) -> LabelVocabulary:
    n, fallback = reader.unpack("<II")
    if n == 0 or fallback >= n:
        raise ModelIoError(f"{reader.name} has an empty or inconsistent label vocabulary")
    labels = []
    counts = []
    for _ in range(n):
        newlines, horizontal, count = reader.unpack("<BBQ")
        labels.append((newlines, horizontal))
        counts.append(count)
    return LabelVocabulary(tuple(labels), tuple(counts), fallback)


def read_magic(data: bytes, name: str) -> bytes:
    if len(data) < 6:
        raise ModelIoError(f"{name} is too short to be a model file")
    return data[:4]
