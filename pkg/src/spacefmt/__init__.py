"""Trainable whitespace-convention learning for Coq-like source.

The package lexes source into an alternating stream of spacing labels and
tokens, learns per-slot spacing conventions with a count-based n-gram model
or a bidirectional recurrent classifier, and can score predictors, emit
linter-style suggestions, or reformat files.
"""

from .brnn import (
    BrnnModel,
    TrainingConfig,
    gradient_check,
    init_brnn,
    load_brnn,
    predict_all,
    predict_distribution,
    save_brnn,
    train_brnn,
)
from .corpus import (
    Corpus,
    CorpusSplit,
    EncodedDocument,
    LabelVocabulary,
    Vocabulary,
    build_corpus,
    build_label_vocab,
    build_vocab,
    decode,
    encode,
    encode_part,
    read_manifest,
    read_split,
    read_vocab,
    split_corpus,
    write_split,
    write_vocab,
)
from .errors import (
    CorpusIoError,
    DegenerateSplitError,
    DivergenceError,
    EmptyCorpusError,
    FormatError,
    LexError,
    MissingRawError,
    ModelIoError,
    ParityError,
    SpacefmtError,
    VocabMismatchError,
)
from .evaluation import (
    BrnnPredictor,
    EvalReport,
    NgramPredictor,
    ReportStyle,
    SlotCategory,
    SlotPosition,
    categorize,
    evaluate,
    render_flat_metrics,
    render_human_table,
    render_report,
)
from .lexer import (
    LexedDocument,
    SpacingLabel,
    Token,
    TokenKind,
    classify_token,
    lex,
    quantize_raw,
    render_canonical,
    render_exact,
)
from .ngram import (
    NgramModel,
    load_ngram,
    predict_spacing_ngram,
    save_ngram,
    train_ngram,
    unsmoothed_score,
)
from .tokenstream import export_token_stream, import_token_stream

__version__ = "0.1.0"

__all__ = [
    "BrnnModel",
    "BrnnPredictor",
    "Corpus",
    "CorpusIoError",
    "CorpusSplit",
    "DegenerateSplitError",
    "DivergenceError",
    "EmptyCorpusError",
    "EncodedDocument",
    "EvalReport",
    "FormatError",
    "LabelVocabulary",
    "LexError",
    "LexedDocument",
    "MissingRawError",
    "ModelIoError",
    "NgramModel",
    "NgramPredictor",
    "ParityError",
    "ReportStyle",
    "SlotCategory",
    "SlotPosition",
    "SpacefmtError",
    "SpacingLabel",
    "Token",
    "TokenKind",
    "TrainingConfig",
    "Vocabulary",
    "VocabMismatchError",
    "build_corpus",
    "build_label_vocab",
    "build_vocab",
    "categorize",
    "classify_token",
    "decode",
    "encode",
    "encode_part",
    "evaluate",
    "export_token_stream",
    "gradient_check",
    "import_token_stream",
    "init_brnn",
    "lex",
    "load_brnn",
    "load_ngram",
    "predict_all",
    "predict_distribution",
    "predict_spacing_ngram",
    "quantize_raw",
    "read_manifest",
    "read_split",
    "read_vocab",
    "render_canonical",
    "render_exact",
    "render_flat_metrics",
    "render_human_table",
    "render_report",
    "save_brnn",
    "save_ngram",
    "split_corpus",
    "train_brnn",
    "train_ngram",
    "unsmoothed_score",
    "write_split",
    "write_vocab",
]
