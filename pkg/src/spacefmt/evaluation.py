"""Top-k accuracy scoring of spacing predictors with category breakdowns.

A predictor is anything with a ``name`` and a ``ranked(enc)`` method that
returns, for every slot of an encoded document, all label-vocabulary ids
ordered best first. A slot is top-k correct when the true quantized label
sits among the first k ranked ids; slots whose true label is outside the
label vocabulary miss at every k.

Beyond the global top-k tallies, slots are grouped by position within or
between sentences, by the kind of the token left of the slot, by the
(left, right) kind pair, and by a diagnostic slice for the newline choice
in front of proof-closing "Qed" sentences.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .brnn import BrnnModel, predict_all
from .corpus import EncodedDocument, LabelVocabulary, Vocabulary
from .errors import VocabMismatchError
from .lexer import LexedDocument, TokenKind
from .ngram import NgramModel, predict_spacing_ngram

_KIND_AGGREGATES = (TokenKind.GALLINA, TokenKind.LTAC, TokenKind.VERNACULAR)
_TOPK_KEYS = ((2, "top-2"), (3, "top-3"), (5, "top-5"))
_FIXED_KEYS = (
    "all",
    "top-2",
    "top-3",
    "top-5",
    "insent",
    "betsent",
    "G",
    "L",
    "V",
    "qed-newline",
)


class SlotPosition(enum.Enum):
    IN_SENTENCE = "insent"
    BETWEEN_SENTENCE = "betsent"


@dataclass(frozen=True)
class SlotCategory:
    position: SlotPosition
    left_kind: TokenKind | None
    right_kind: TokenKind
    qed_flag: bool


def categorize(doc: LexedDocument, index: int) -> SlotCategory:
    """Classify the spacing slot in front of token ``index``.

    A slot is between sentences when it opens the document or follows a
    sentence-final token; the kind pair names the flanking tokens (no left
    token at the document start); the qed flag marks slots that open a
    sentence whose first token is "Qed".
    """
    if not 0 <= index < len(doc):
        raise ValueError(f"token index {index} is outside the document")
    tokens = doc.tokens
    between = index == 0 or (index - 1) in doc.sentence_ends
    position = SlotPosition.BETWEEN_SENTENCE if between else SlotPosition.IN_SENTENCE
    left = tokens[index - 1].kind if index else None
    return SlotCategory(
        position=position,
        left_kind=left,
        right_kind=tokens[index].kind,
        qed_flag=between and tokens[index].text == "Qed",
    )


@dataclass
class Tally:
    correct: int = 0
    total: int = 0

    @property
    def accuracy(self) -> float | None:
        return self.correct / self.total if self.total else None

    def add(self, hit: bool) -> None:
        self.total += 1
        self.correct += bool(hit)


@dataclass(frozen=True)
class EvalReport:
    predictor: str
    split: str
    tallies: dict[str, Tally] = field(default_factory=dict)

    def accuracy(self, key: str) -> float | None:
        tally = self.tallies.get(key)
        return tally.accuracy if tally else None


def _check_vocabs(vocab: Vocabulary, label_vocab: LabelVocabulary, enc: EncodedDocument):
    if enc.vocab.tokens != vocab.tokens or enc.label_vocab.labels != label_vocab.labels:
        raise VocabMismatchError(
            "document was encoded against different vocabularies than the model"
        )


class NgramPredictor:
    """Ranks slots with the count-table model, teacher-forced on true labels."""

    def __init__(self, model: NgramModel, name: str = "ngram"):
        self.model = model
        self.name = name

    def ranked(self, enc: EncodedDocument) -> np.ndarray:
        model = self.model
        _check_vocabs(model.vocab, model.label_vocab, enc)
        n = len(enc)
        window = model.order - 1
        stream: list[int] = [model.bod_id] * window
        out = np.empty((n, len(model.label_vocab)), dtype=np.int64)
        for i in range(n):
            context = stream[-window:] if window else []
            out[i] = [lid for lid, _ in predict_spacing_ngram(model, context)]
            stream.append(model.label_base + int(enc.label_ids[i]))
            stream.append(int(enc.token_ids[i]))
        return out


class BrnnPredictor:
    """Ranks slots with the bidirectional recurrent model."""

    def __init__(self, model: BrnnModel, name: str = "brnn"):
        self.model = model
        self.name = name

    def ranked(self, enc: EncodedDocument) -> np.ndarray:
        _check_vocabs(self.model.vocab, self.model.label_vocab, enc)
        probs = predict_all(self.model, enc)
        # Stable sort on negated probabilities breaks ties by ascending id.
        return np.argsort(-probs, axis=1, kind="stable")


def evaluate(predictor, docs: list[EncodedDocument], split: str = "test") -> EvalReport:
    """Score every label slot of every document and tally per category."""
    tallies: dict[str, Tally] = {key: Tally() for key in _FIXED_KEYS}
    pair_tallies: dict[str, Tally] = {}

    for enc in docs:
        n = len(enc)
        if n == 0:
            continue
        ranked = predictor.ranked(enc)
        rank_of_true = (ranked == enc.label_ids[:, None]).argmax(axis=1)
        # An out-of-vocabulary label is absent from the ranking entirely, so
        # it must miss at every k; park it beyond any scored cutoff.
        rank_of_true = np.where(enc.label_oov, np.iinfo(np.int64).max, rank_of_true)
        doc = enc.doc
        ends = frozenset(doc.sentence_ends)
        tokens = doc.tokens
        for i in range(n):
            rank = int(rank_of_true[i])
            hit1 = rank < 1
            tallies["all"].add(hit1)
            for k, key in _TOPK_KEYS:
                tallies[key].add(rank < k)
            between = i == 0 or (i - 1) in ends
            tallies["betsent" if between else "insent"].add(hit1)
            left = tokens[i - 1].kind if i else None
            if left in _KIND_AGGREGATES:
                tallies[left.value].add(hit1)
                pair_key = f"{left.value}-{tokens[i].kind.value}"
                pair_tallies.setdefault(pair_key, Tally()).add(hit1)
            if between and tokens[i].text == "Qed":
                tallies["qed-newline"].add(hit1)

    assert (
        tallies["all"].correct
        <= tallies["top-2"].correct
        <= tallies["top-3"].correct
        <= tallies["top-5"].correct
    )
    assert tallies["insent"].total + tallies["betsent"].total == tallies["all"].total
    for kind in _KIND_AGGREGATES:
        pair_sum = sum(
            tally.total
            for key, tally in pair_tallies.items()
            if key.startswith(f"{kind.value}-")
        )
        assert pair_sum == tallies[kind.value].total

    for key in sorted(pair_tallies):
        tallies[key] = pair_tallies[key]
    return EvalReport(predictor=predictor.name, split=split, tallies=tallies)


class ReportStyle(enum.Enum):
    HUMAN_TABLE = "human"
    FLAT_METRICS = "flat"


def _percent(value: float | None) -> str:
    return "n/a" if value is None else f"{100.0 * value:.1f}%"


def render_human_table(reports: list[EvalReport]) -> str:
    """Fixed-width summary table: one row per predictor, Top-1 and Top-3.

    The category breakdowns behind the flat metrics (insent, betsent, kind
    pairs, qed-newline) follow this tool's own definitions; the header says
    so because other tools may slice slots differently.
    """
    splits = sorted({report.split for report in reports})
    lines = [
        f"# Spacing accuracy on split: {', '.join(splits) if splits else 'n/a'}",
        "# Top-1/Top-3 cover all slots; category slicing (insent, betsent,",
        "# kind pairs, qed-newline) follows this tool's interpretation.",
    ]
    names = [report.predictor for report in reports]
    top1 = [_percent(report.accuracy("all")) for report in reports]
    top3 = [_percent(report.accuracy("top-3")) for report in reports]
    widths = (
        max((len(c) for c in names), default=5),
        max([len(c) for c in top1] + [5]),
        max([len(c) for c in top3] + [5]),
    )
    rows = [("Model", "Top-1", "Top-3"), *zip(names, top1, top3)]
    for row in rows:
        cells = (cell.ljust(w) for cell, w in zip(row, widths))
        lines.append("  ".join(cells).rstrip())
    return "\n".join(lines) + "\n"


def render_flat_metrics(reports: list[EvalReport]) -> str:
    """`<predictor>-<split>-accuracy-<category> <value>` lines, sorted by key.

    Categories that scored no slots are omitted.
    """
    lines = []
    for report in reports:
        for key, tally in report.tallies.items():
            if tally.total:
                lines.append(
                    f"{report.predictor}-{report.split}-accuracy-{key} "
                    f"{tally.accuracy:.6f}"
                )
    return "\n".join(sorted(lines)) + ("\n" if lines else "")


def render_report(
    report: EvalReport | list[EvalReport], style: ReportStyle | str
) -> str:
    reports = [report] if isinstance(report, EvalReport) else list(report)
    style = ReportStyle(style) if isinstance(style, str) else style
    if style is ReportStyle.HUMAN_TABLE:
        return render_human_table(reports)
    return render_flat_metrics(reports)
