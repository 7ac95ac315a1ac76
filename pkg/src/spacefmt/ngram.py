"""Interleaved n-gram model over spacing labels and tokens.

The model counts every k-gram (k up to the order) of the interleaved
stream s0 t0 s1 t1 ... where spacing-label ids and token ids occupy
disjoint ranges of one joint alphabet. Each document is padded with
order-1 begin markers and one end marker. Scoring backs off: a seen
(context, item) n-gram scores count/count(context); otherwise the context
is shortened and the score multiplied by the backoff factor, bottoming out
at an add-one unigram estimate, so every score is positive. The token
after a slot is never part of the context.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

from .corpus import EncodedDocument, LabelVocabulary, Vocabulary
from .errors import ModelIoError, ParityError
from .model_io import (
    Reader,
    pack_label_vocab,
    pack_vocab,
    read_magic,
    unpack_label_vocab,
    unpack_vocab,
)

DEFAULT_ORDER = 4
DEFAULT_BACKOFF = 0.4

_MAGIC = b"SFNG"
_VERSION = 1


@dataclass
class NgramModel:
    order: int
    backoff_factor: float
    vocab: Vocabulary
    label_vocab: LabelVocabulary
    counts: tuple[dict[tuple[int, ...], int], ...]  # counts[k-1] holds k-grams
    total_items: int

    @property
    def label_base(self) -> int:
        """Label ids are offset past the token ids in the joint alphabet."""
        return len(self.vocab)

    @property
    def bod_id(self) -> int:
        return len(self.vocab) + len(self.label_vocab)

    @property
    def eod_id(self) -> int:
        return self.bod_id + 1

    @property
    def alphabet_size(self) -> int:
        return len(self.vocab) + len(self.label_vocab) + 2

    def score(self, context: list[int] | tuple[int, ...], item: int) -> float:
        """Backoff score of one joint-alphabet item after a context."""
        ctx = tuple(int(c) for c in context)
        if self.order > 1:
            ctx = ctx[-(self.order - 1) :]
        else:
            ctx = ()
        factor = 1.0
        while ctx:
            hit = self.counts[len(ctx)].get(ctx + (int(item),), 0)
            if hit:
                # A k-gram's prefix is always at least as frequent, so the
                # denominator exists whenever the numerator is positive.
                return factor * hit / self.counts[len(ctx) - 1][ctx]
            factor *= self.backoff_factor
            ctx = ctx[1:]
        unigram = self.counts[0].get((int(item),), 0)
        return factor * (unigram + 1) / (self.total_items + self.alphabet_size)

    def rank_labels(self, context: list[int] | tuple[int, ...]) -> list[tuple[int, float]]:
        return predict_spacing_ngram(self, context)


def interleaved_ids(enc: EncodedDocument, label_base: int) -> list[int]:
    out: list[int] = []
    for lab, tok in zip(enc.label_ids, enc.token_ids):
        out.append(label_base + int(lab))
        out.append(int(tok))
    return out


def padded_stream(enc: EncodedDocument, order: int, label_base: int, bod: int, eod: int) -> list[int]:
    return [bod] * (order - 1) + interleaved_ids(enc, label_base) + [eod]


def train_ngram(
    docs: list[EncodedDocument],
    order: int = DEFAULT_ORDER,
    backoff_factor: float = DEFAULT_BACKOFF,
) -> NgramModel:
    """Count all k-grams (k <= order) over the padded document streams."""
    if order < 1:
        raise ValueError("order must be at least 1")
    if not 0 < backoff_factor <= 1:
        raise ValueError("backoff factor must lie in (0, 1]")
    if not docs:
        raise ValueError("cannot train on an empty document list")
    vocab = docs[0].vocab
    label_vocab = docs[0].label_vocab
    label_base = len(vocab)
    bod = label_base + len(label_vocab)
    eod = bod + 1

    counts: tuple[dict[tuple[int, ...], int], ...] = tuple({} for _ in range(order))
    total = 0
    for enc in docs:
        stream = padded_stream(enc, order, label_base, bod, eod)
        n = len(stream)
        total += n
        for i in range(n):
            top = min(order, n - i)
            for k in range(1, top + 1):
                key = tuple(stream[i : i + k])
                table = counts[k - 1]
                table[key] = table.get(key, 0) + 1
    return NgramModel(order, backoff_factor, vocab, label_vocab, counts, total)


def predict_spacing_ngram(
    model: NgramModel, context: list[int] | tuple[int, ...]
) -> list[tuple[int, float]]:
    """Rank every label for the slot after the context, best first.

    The context must end just before a label slot of the interleaved
    stream: its last id must be a token id or a begin marker. Ties are
    broken by ascending label id. Returned ids are label-vocabulary ids.
    """
    if len(context):
        last = int(context[-1])
        base = model.label_base
        if base <= last < base + len(model.label_vocab) or last == model.eod_id:
            raise ParityError("context ends on a label; the next position is a token slot")
    scored = [
        (model.score(context, model.label_base + lid), lid)
        for lid in range(len(model.label_vocab))
    ]
    scored.sort(key=lambda pair: (-pair[0], pair[1]))
    return [(lid, score) for score, lid in scored]


def unsmoothed_score(
    model: NgramModel, context: list[int] | tuple[int, ...], item: int
) -> float | None:
    """Highest-order conditional count(ctx+item)/count(ctx), no smoothing.

    The context is truncated to the model's longest window (order - 1 ids).
    Returns None when that exact window was never observed — the case the
    backoff in ``score`` exists to handle. With order 1 this is the plain
    unigram frequency.
    """
    ctx = tuple(int(c) for c in context)
    if model.order > 1:
        ctx = ctx[-(model.order - 1) :]
    else:
        ctx = ()
    if not ctx:
        if model.total_items == 0:
            return None
        return model.counts[0].get((int(item),), 0) / model.total_items
    denom = model.counts[len(ctx) - 1].get(ctx, 0)
    if denom == 0:
        return None
    return model.counts[len(ctx)].get(ctx + (int(item),), 0) / denom


def save_ngram(model: NgramModel, path: str | Path) -> None:
    parts = [
        _MAGIC,
        struct.pack("<HHd", _VERSION, model.order, model.backoff_factor),
        pack_vocab(model.vocab),
        pack_label_vocab(model.label_vocab),
        struct.pack("<Q", model.total_items),
    ]
    for k in range(1, model.order + 1):
        table = model.counts[k - 1]
        parts.append(struct.pack("<Q", len(table)))
        entry = struct.Struct(f"<{k}IQ")
        for key in sorted(table):
            parts.append(entry.pack(*key, table[key]))
    Path(path).write_bytes(b"".join(parts))


def load_ngram(path: str | Path) -> NgramModel:
    data = Path(path).read_bytes()
    name = str(path)
    if read_magic(data, name) != _MAGIC:
        raise ModelIoError(f"{name} is not an n-gram model file")
    reader = Reader(data, name)
    reader.take(4)
    version, order, backoff = reader.unpack("<HHd")
    if version != _VERSION:
        raise ModelIoError(f"{name} has unsupported version {version}")
    if order < 1:
        raise ModelIoError(f"{name} has a bad order {order}")
    vocab = unpack_vocab(reader)
    label_vocab = unpack_label_vocab(reader)
    (total,) = reader.unpack("<Q")
    counts = []
    alphabet = len(vocab) + len(label_vocab) + 2
    for k in range(1, order + 1):
        (n_entries,) = reader.unpack("<Q")
        entry = struct.Struct(f"<{k}IQ")
        table: dict[tuple[int, ...], int] = {}
        for _ in range(n_entries):
            *key, count = entry.unpack(reader.take(entry.size))
            if any(i >= alphabet for i in key):
                raise ModelIoError(f"{name} has an id outside the joint alphabet")
            table[tuple(key)] = count
        counts.append(table)
    reader.expect_end()
    return NgramModel(order, backoff, vocab, label_vocab, tuple(counts), total)


def greedy_labels(
    model: NgramModel, enc: EncodedDocument, allow
) -> list[tuple[int, int]]:
    """Predict every slot left to right, feeding predictions back in.

    ``allow(i, pair)`` vetoes a candidate label for slot i; the best
    non-vetoed candidate wins. If everything is vetoed the spacing falls
    back to a single space.
    """
    label_base = model.label_base
    stream = padded_stream(enc, model.order, label_base, model.bod_id, model.eod_id)
    out: list[tuple[int, int]] = []
    for i in range(len(enc)):
        pos = (model.order - 1) + 2 * i
        ranked = predict_spacing_ngram(model, stream[:pos])
        chosen: tuple[int, int] | None = None
        chosen_id = model.label_vocab.fallback_id
        for lid, _ in ranked:
            pair = model.label_vocab.labels[lid]
            if allow(i, pair):
                chosen = pair
                chosen_id = lid
                break
        if chosen is None:
            chosen = (0, 1)
            chosen_id = model.label_vocab.fallback_id
        out.append(chosen)
        stream[pos] = label_base + chosen_id
    return out
