"""Corpus construction, file-level splits, vocabularies, and encoding.

Splits are made by whole files: paths are sorted lexicographically,
shuffled by a seeded PRNG, and partitioned contiguously by the requested
ratios (largest-remainder rounding). Token ids are assigned by descending
training frequency with id 0 reserved for the unknown token; spacing-label
ids cover exactly the labels observed in training, with the most frequent
label doubling as the fallback for out-of-vocabulary labels.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    CorpusIoError,
    DegenerateSplitError,
    EmptyCorpusError,
    FormatError,
    LexError,
)
from .lexer import LexedDocument, lex
from .tokenstream import escape_field, import_token_stream, unescape_field

UNK_ID = 0
UNK_TOKEN = "<unk>"
DEFAULT_MIN_COUNT = 2
DEFAULT_RATIOS = (0.8, 0.1, 0.1)

_SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class Corpus:
    """Documents paired with the paths they came from."""

    documents: tuple[tuple[str, LexedDocument], ...]
    origin: str  # "lex" or "import"

    def __len__(self) -> int:
        return len(self.documents)

    @property
    def paths(self) -> tuple[str, ...]:
        return tuple(path for path, _ in self.documents)


def build_corpus(
    paths: list[str | Path], mode: str = "lex"
) -> tuple[Corpus, tuple[tuple[str, str], ...]]:
    """Read and lex (or import) files into a corpus.

    Files that fail to parse are skipped and reported as (path, reason)
    pairs. Raises CorpusIoError for unreadable paths and EmptyCorpusError
    when nothing survives.
    """
    if mode not in ("lex", "import"):
        raise ValueError(f"unknown corpus mode {mode!r}")
    documents: list[tuple[str, LexedDocument]] = []
    skipped: list[tuple[str, str]] = []
    seen: set[str] = set()
    for raw_path in paths:
        path = str(raw_path)
        if path in seen:
            continue
        seen.add(path)
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise CorpusIoError(f"cannot read {path}: {exc}") from exc
        except UnicodeDecodeError as exc:
            skipped.append((path, f"not valid UTF-8: {exc}"))
            continue
        try:
            doc = lex(text) if mode == "lex" else import_token_stream(text)
        except (LexError, FormatError) as exc:
            skipped.append((path, str(exc)))
            continue
        if not doc.items:
            skipped.append((path, "document contains no tokens"))
            continue
        documents.append((path, doc))
    if not documents:
        raise EmptyCorpusError("no document survived corpus construction")
    return Corpus(tuple(documents), mode), tuple(skipped)


@dataclass(frozen=True)
class CorpusSplit:
    """Document indices per part. seed/ratios are None for loaded splits."""

    train: tuple[int, ...]
    validation: tuple[int, ...]
    test: tuple[int, ...]
    seed: int | None = None
    ratios: tuple[float, float, float] | None = None

    def part(self, name: str) -> tuple[int, ...]:
        if name not in ("train", "validation", "test"):
            raise ValueError(f"unknown split part {name!r}")
        return getattr(self, name)


def _largest_remainder_sizes(n: int, ratios: tuple[float, ...]) -> list[int]:
    quotas = [n * r for r in ratios]
    sizes = [int(q) for q in quotas]
    leftover = n - sum(sizes)
    # Distribute the remainder by descending fractional part; ties go to the
    # earlier part so train fills before validation before test.
    order = sorted(range(len(ratios)), key=lambda i: (-(quotas[i] - sizes[i]), i))
    for i in order[:leftover]:
        sizes[i] += 1
    return sizes


def split_corpus(
    corpus: Corpus, ratios: tuple[float, float, float] = DEFAULT_RATIOS, seed: int = 0
) -> CorpusSplit:
    """Deterministic whole-file split; same paths, seed, ratios -> same split."""
    if len(ratios) != 3:
        raise ValueError("ratios must have exactly three entries")
    if any(r < 0 for r in ratios):
        raise ValueError("ratios must be non-negative")
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError(f"ratios must sum to 1, got {sum(ratios)}")

    index_by_path = {path: i for i, (path, _) in enumerate(corpus.documents)}
    ordered = sorted(index_by_path)
    rng = np.random.default_rng(int(seed) & _SEED_MASK)
    perm = rng.permutation(len(ordered))
    shuffled = [index_by_path[ordered[p]] for p in perm]

    sizes = _largest_remainder_sizes(len(shuffled), tuple(ratios))
    for size, ratio, name in zip(sizes, ratios, ("train", "validation", "test")):
        if size == 0 and ratio > 0:
            raise DegenerateSplitError(
                f"{name} part received zero documents at ratio {ratio}"
            )
    a, b = sizes[0], sizes[0] + sizes[1]
    return CorpusSplit(
        train=tuple(shuffled[:a]),
        validation=tuple(shuffled[a:b]),
        test=tuple(shuffled[b:]),
        seed=int(seed),
        ratios=(float(ratios[0]), float(ratios[1]), float(ratios[2])),
    )


SPLIT_HEADER = "split v1"
_PART_TAGS = (("train", "train"), ("val", "validation"), ("test", "test"))


def write_split(corpus: Corpus, split: CorpusSplit) -> str:
    lines = [SPLIT_HEADER]
    for tag, part in _PART_TAGS:
        for idx in split.part(part):
            lines.append(f"{tag} {corpus.documents[idx][0]}")
    return "\n".join(lines) + "\n"


def read_split(corpus: Corpus, text: str) -> CorpusSplit:
    """Parse a split record file against a corpus; unknown paths are errors."""
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or lines[0] != SPLIT_HEADER:
        raise FormatError(f"expected header {SPLIT_HEADER!r}", 1)
    index_by_path = {path: i for i, (path, _) in enumerate(corpus.documents)}
    parts: dict[str, list[int]] = {"train": [], "validation": [], "test": []}
    tag_map = dict(_PART_TAGS)
    for lineno, line in enumerate(lines[1:], start=2):
        tag, _, path = line.partition(" ")
        if tag not in tag_map or not path:
            raise FormatError(f"bad split record {line!r}", lineno)
        if path not in index_by_path:
            raise FormatError(f"path {path!r} is not in the corpus", lineno)
        parts[tag_map[tag]].append(index_by_path[path])
    return CorpusSplit(
        train=tuple(parts["train"]),
        validation=tuple(parts["validation"]),
        test=tuple(parts["test"]),
    )


@dataclass(frozen=True)
class Vocabulary:
    """Token lexemes with dense ids; id 0 is the unknown token."""

    tokens: tuple[str, ...]
    counts: tuple[int, ...]  # counts[0] totals the occurrences dropped to UNK
    min_count: int
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_index", {t: i for i, t in enumerate(self.tokens)})

    def __len__(self) -> int:
        return len(self.tokens)

    def id_of(self, text: str) -> int:
        return self._index.get(text, UNK_ID)

    def __contains__(self, text: str) -> bool:
        return text in self._index


def build_vocab(docs: list[LexedDocument], min_count: int = DEFAULT_MIN_COUNT) -> Vocabulary:
    if min_count < 1:
        raise ValueError("min_count must be at least 1")
    counter: Counter[str] = Counter()
    for doc in docs:
        counter.update(token.text for _, token in doc.items)
    kept = sorted(
        (item for item in counter.items() if item[1] >= min_count),
        key=lambda item: (-item[1], item[0]),
    )
    dropped = sum(c for _, c in counter.items() if c < min_count)
    tokens = (UNK_TOKEN,) + tuple(t for t, _ in kept)
    counts = (dropped,) + tuple(c for _, c in kept)
    return Vocabulary(tokens, counts, min_count)


@dataclass(frozen=True)
class LabelVocabulary:
    """Spacing labels observed in training, most frequent first."""

    labels: tuple[tuple[int, int], ...]
    counts: tuple[int, ...]
    fallback_id: int
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_index", {l: i for i, l in enumerate(self.labels)})

    def __len__(self) -> int:
        return len(self.labels)

    def id_of(self, pair: tuple[int, int]) -> int | None:
        return self._index.get(pair)

    def __contains__(self, pair: tuple[int, int]) -> bool:
        return pair in self._index


def build_label_vocab(docs: list[LexedDocument]) -> LabelVocabulary:
    counter: Counter[tuple[int, int]] = Counter()
    for doc in docs:
        counter.update(label.pair for label, _ in doc.items)
    if not counter:
        raise EmptyCorpusError("no spacing labels to build a vocabulary from")
    ordered = sorted(counter.items(), key=lambda item: (-item[1], item[0]))
    labels = tuple(l for l, _ in ordered)
    counts = tuple(c for _, c in ordered)
    return LabelVocabulary(labels, counts, fallback_id=0)


VOCAB_HEADER = "vocab v1"


def write_vocab(vocab: Vocabulary) -> str:
    lines = [VOCAB_HEADER]
    for i, (token, count) in enumerate(zip(vocab.tokens, vocab.counts)):
        lines.append(f"{i} {count} {escape_field(token)}")
    return "\n".join(lines) + "\n"


def read_vocab(text: str, min_count: int = DEFAULT_MIN_COUNT) -> Vocabulary:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or lines[0] != VOCAB_HEADER:
        raise FormatError(f"expected header {VOCAB_HEADER!r}", 1)
    tokens: list[str] = []
    counts: list[int] = []
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split(" ")
        if len(parts) != 3:
            raise FormatError("vocabulary record needs 3 fields", lineno)
        try:
            ident = int(parts[0], 10)
            count = int(parts[1], 10)
        except ValueError:
            raise FormatError("bad vocabulary numbers", lineno) from None
        if ident != len(tokens):
            raise FormatError(f"ids must be dense and ordered, got {ident}", lineno)
        if count < 0:
            raise FormatError("negative count", lineno)
        tokens.append(unescape_field(parts[2], lineno))
        counts.append(count)
    if not tokens or tokens[0] != UNK_TOKEN:
        raise FormatError(f"id 0 must be the unknown token {UNK_TOKEN!r}", 2)
    return Vocabulary(tuple(tokens), tuple(counts), min_count)


@dataclass
class EncodedDocument:
    """A document mapped to vocabulary ids, ready for modeling.

    label_ids holds the fallback id wherever the true label is out of
    vocabulary; label_oov marks those slots.
    """

    doc: LexedDocument
    token_ids: np.ndarray
    label_ids: np.ndarray
    label_oov: np.ndarray
    vocab: Vocabulary
    label_vocab: LabelVocabulary
    path: str = ""

    def __len__(self) -> int:
        return len(self.doc.items)


def encode(
    doc: LexedDocument,
    vocab: Vocabulary,
    label_vocab: LabelVocabulary,
    path: str = "",
) -> EncodedDocument:
    n = len(doc.items)
    token_ids = np.empty(n, dtype=np.int64)
    label_ids = np.empty(n, dtype=np.int64)
    label_oov = np.zeros(n, dtype=bool)
    for i, (label, token) in enumerate(doc.items):
        token_ids[i] = vocab.id_of(token.text)
        lid = label_vocab.id_of(label.pair)
        if lid is None:
            label_ids[i] = label_vocab.fallback_id
            label_oov[i] = True
        else:
            label_ids[i] = lid
    return EncodedDocument(doc, token_ids, label_ids, label_oov, vocab, label_vocab, path)


def decode(enc: EncodedDocument) -> tuple[tuple[str, ...], tuple[tuple[int, int], ...]]:
    """Map ids back to lexemes and label pairs (UNK/fallback where OOV)."""
    texts = tuple(enc.vocab.tokens[i] for i in enc.token_ids)
    pairs = tuple(enc.label_vocab.labels[i] for i in enc.label_ids)
    return texts, pairs


def encode_part(
    corpus: Corpus,
    indices: tuple[int, ...],
    vocab: Vocabulary,
    label_vocab: LabelVocabulary,
) -> list[EncodedDocument]:
    return [
        encode(corpus.documents[i][1], vocab, label_vocab, path=corpus.documents[i][0])
        for i in indices
    ]


def read_manifest(text: str) -> list[str]:
    """One path per line; blank lines and #-comments are ignored."""
    paths = []
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            paths.append(line)
    return paths
