"""Command-line interface: lex, stats, split, train, eval, gradcheck,
suggest, and reformat subcommands.

Options resolve in three layers: a command-line flag wins over the same
key in the ``--config`` file (plain ``key = value`` lines, ``#`` comments,
keys spelled like the flag with underscores), which wins over the built-in
default shown in ``--help``.

Exit codes: 0 success; 1 usage errors (bad flags, unreadable inputs,
incompatible model/corpus); 2 lexing or data-format errors; 3 model-file
errors; 4 a quality threshold was missed (``--min-top1``, gradient-check
tolerance).
"""

from __future__ import annotations

import argparse
import sys
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np

from .brnn import (
    BrnnModel,
    TrainingConfig,
    gradient_check,
    init_brnn,
    load_brnn,
    predict_all,
    save_brnn,
    train_brnn,
)
from .brnn import greedy_labels as brnn_greedy_labels
from .corpus import (
    Corpus,
    CorpusSplit,
    build_corpus,
    build_label_vocab,
    build_vocab,
    encode,
    encode_part,
    read_manifest,
    read_split,
    split_corpus,
    write_split,
)
from .errors import (
    CorpusIoError,
    DegenerateSplitError,
    DivergenceError,
    EmptyCorpusError,
    FormatError,
    LexError,
    ModelIoError,
    VocabMismatchError,
)
from .evaluation import (
    BrnnPredictor,
    NgramPredictor,
    evaluate,
    render_flat_metrics,
    render_human_table,
)
from .lexer import LexedDocument, SpacingLabel, lex, render_canonical
from .ngram import NgramModel, load_ngram, predict_spacing_ngram, save_ngram, train_ngram
from .ngram import greedy_labels as ngram_greedy_labels
from .tokenstream import export_token_stream

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_MODEL = 3
EXIT_THRESHOLD = 4


class _UsageError(Exception):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    """argparse with usage failures mapped to exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# Option declarations: one registry drives flag parsing, config-file
# resolution, and the defaults documented in --help.


def _parse_ratios(text: str) -> tuple[float, float, float]:
    parts = text.split(",")
    if len(parts) != 3:
        raise ValueError("expected three comma-separated numbers, e.g. 0.8,0.1,0.1")
    return tuple(float(part) for part in parts)


def _parse_part(text: str) -> str:
    if text not in ("train", "validation", "test"):
        raise ValueError("expected one of: train, validation, test")
    return text


def _parse_mode(text: str) -> str:
    if text not in ("lex", "import"):
        raise ValueError("expected 'lex' (Coq-like source) or 'import' (token streams)")
    return text


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _parse_topk(text: str) -> tuple[int, ...]:
    ks = tuple(sorted({int(part) for part in text.split(",") if part.strip()}))
    if not ks or any(k not in (1, 2, 3, 5) for k in ks):
        raise ValueError("expected a comma-separated subset of 1,2,3,5")
    return ks


@dataclass(frozen=True)
class _Opt:
    dest: str
    convert: object
    default: object
    help: str
    metavar: str = "VALUE"
    is_flag: bool = False
    shown: str | None = None

    @property
    def flag(self) -> str:
        return "--" + self.dest.replace("_", "-")


_ALL_CONFIG_KEYS: set[str] = set()


def _opt(dest, convert, default, help, metavar="VALUE", is_flag=False, shown=None):
    _ALL_CONFIG_KEYS.add(dest)
    return _Opt(dest, convert, default, help, metavar, is_flag, shown)


_MANIFEST = _opt(
    "manifest", str, None, "file listing one input path per line (# comments allowed)",
    metavar="FILE", shown="none",
)
_MODE = _opt("mode", _parse_mode, "lex", "input kind: lex source files or import token streams")
_RATIOS = _opt(
    "ratios", _parse_ratios, (0.8, 0.1, 0.1),
    "train,validation,test fractions", metavar="R,R,R", shown="0.8,0.1,0.1",
)
_SEED = _opt("seed", int, 0, "seed for every randomized step", metavar="N")

_LEX_OPTS = [
    _opt("out", str, None, "output file for the token stream", metavar="FILE", shown="stdout"),
]
_STATS_OPTS = [
    _MANIFEST, _MODE,
    _opt("top", int, 20, "how many most-frequent tokens to list", metavar="N"),
]
_SPLIT_OPTS = [
    _MANIFEST, _MODE, _RATIOS, _SEED,
    _opt("out", str, None, "output file for the split record", metavar="FILE", shown="stdout"),
]
_TRAIN_OPTS = [
    _MANIFEST, _MODE, _RATIOS, _SEED,
    _opt("split", str, None, "split record file (overrides --ratios)", metavar="FILE", shown="none"),
    _opt("out", str, None, "output model file (required)", metavar="FILE", shown="none"),
    _opt("min_count", int, 2, "tokens seen fewer times map to the unknown id", metavar="N"),
    _opt("order", int, 4, "n-gram window size in stream items", metavar="N"),
    _opt("backoff", float, 0.4, "n-gram backoff penalty factor in (0, 1]", metavar="X"),
    _opt("d_emb", int, 64, "embedding width", metavar="N"),
    _opt("d_hidden", int, 128, "recurrent state width", metavar="N"),
    _opt("learning_rate", float, 1e-3, "optimizer step size", metavar="X"),
    _opt("clip_norm", float, 5.0, "global gradient-norm ceiling", metavar="X"),
    _opt("max_epochs", int, 30, "training epoch cap", metavar="N"),
    _opt("patience", int, 3, "non-improving epochs tolerated before stopping", metavar="N"),
    _opt("segment_length", int, 256, "window size in stream items", metavar="N"),
    _opt("segment_overlap", int, 32, "stream items shared between windows", metavar="N"),
    _opt("batch_size", int, 32, "windows per optimizer step", metavar="N"),
    _opt("quiet", _parse_bool, False, "suppress per-epoch progress", is_flag=True),
]
_EVAL_OPTS = [
    _MANIFEST, _MODE, _RATIOS, _SEED,
    _opt("split", str, None, "split record file (overrides --ratios)", metavar="FILE", shown="none"),
    _opt("part", _parse_part, "test", "which split part to score"),
    _opt("out", str, None, "directory for report.txt, metrics.txt, and figures",
         metavar="DIR", shown="stdout"),
    _opt("min_top1", float, None, "exit 4 if any model's top-1 accuracy is lower",
         metavar="X", shown="no gate"),
    _opt("topk", _parse_topk, (1, 2, 3, 5), "ranks shown in the top-k figure",
         metavar="K,K,...", shown="1,2,3,5"),
]
_GRADCHECK_OPTS = [
    _SEED,
    _opt("d_emb", int, 4, "embedding width", metavar="N"),
    _opt("d_hidden", int, 6, "recurrent state width", metavar="N"),
    _opt("epsilon", float, 1e-5, "finite-difference step", metavar="X"),
    _opt("samples", int, 200, "minimum coordinates to probe", metavar="N"),
    _opt("tolerance", float, 1e-4, "exit 4 if the max relative error is larger", metavar="X"),
]
_SUGGEST_OPTS = [
    _opt("model", str, None, "trained model file (required)", metavar="FILE", shown="none"),
]
_REFORMAT_OPTS = [
    _opt("model", str, None, "trained model file (required)", metavar="FILE", shown="none"),
    _opt("out", str, None, "output file for the reformatted source", metavar="FILE",
         shown="stdout"),
]


def _add_options(parser: argparse.ArgumentParser, opts: list[_Opt]) -> None:
    for opt in opts:
        shown = opt.shown if opt.shown is not None else opt.default
        help_text = f"{opt.help} (default: {shown})"
        if opt.is_flag:
            parser.add_argument(
                opt.flag, dest=opt.dest, action="store_true", default=None, help=help_text
            )
        else:
            parser.add_argument(
                opt.flag, dest=opt.dest, metavar=opt.metavar, default=None, help=help_text
            )


def _load_config(path: str) -> dict[str, str]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise _UsageError(f"cannot read config file: {exc}")
    mapping: dict[str, str] = {}
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise _UsageError(f"{path}:{lineno}: expected 'key = value'")
        key = key.strip()
        if key not in _ALL_CONFIG_KEYS:
            raise _UsageError(f"{path}:{lineno}: unknown option {key!r}")
        mapping[key] = value.strip()
    return mapping


def _resolve_options(args: argparse.Namespace, opts: list[_Opt]) -> dict:
    config = _load_config(args.config) if getattr(args, "config", None) else {}
    resolved = {}
    for opt in opts:
        value = getattr(args, opt.dest)
        if value is None:
            value = config.get(opt.dest)
        if value is None:
            resolved[opt.dest] = opt.default
        elif isinstance(value, str):
            try:
                resolved[opt.dest] = opt.convert(value)
            except ValueError as exc:
                raise _UsageError(f"bad value for {opt.dest}: {exc}")
        else:
            resolved[opt.dest] = value
    return resolved


# ---------------------------------------------------------------------------
# Shared plumbing.


def _read_source(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise _UsageError(f"cannot read {path}: {exc}")
    except UnicodeDecodeError:
        raise FormatError(f"{path} is not valid UTF-8 text", 1)


def _write_text(out: str | None, text: str) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        try:
            Path(out).write_text(text, encoding="utf-8")
        except OSError as exc:
            raise _UsageError(f"cannot write {out}: {exc}")


def _gather_corpus(args: argparse.Namespace, options: dict) -> Corpus:
    paths: list[str] = list(getattr(args, "inputs", []) or [])
    if options.get("manifest"):
        paths.extend(read_manifest(_read_source(options["manifest"])))
    if not paths:
        raise _UsageError("no input files given (positional paths or --manifest)")
    corpus, skipped = build_corpus(paths, mode=options.get("mode", "lex"))
    for path, reason in skipped:
        print(f"note: skipped {path}: {reason}", file=sys.stderr)
    return corpus


def _resolve_split(corpus: Corpus, options: dict) -> CorpusSplit:
    if options.get("split"):
        return read_split(corpus, _read_source(options["split"]))
    return split_corpus(corpus, options["ratios"], options["seed"])


def _load_model(path: str) -> NgramModel | BrnnModel:
    try:
        magic = Path(path).read_bytes()[:4]
    except OSError as exc:
        raise ModelIoError(f"cannot read model file: {exc}")
    if magic == b"SFNG":
        return load_ngram(path)
    if magic == b"SFBR":
        return load_brnn(path)
    raise ModelIoError(f"{path} is not a recognized model file")


def _make_predictor(model: NgramModel | BrnnModel, name: str):
    if isinstance(model, NgramModel):
        return NgramPredictor(model, name=name)
    return BrnnPredictor(model, name=name)


def _predictor_names(models: list[NgramModel | BrnnModel]) -> list[str]:
    """ngram/brnn, disambiguated as ngram-2, ngram-3, ... on repeats."""
    names = []
    seen: Counter[str] = Counter()
    for model in models:
        base = "ngram" if isinstance(model, NgramModel) else "brnn"
        seen[base] += 1
        names.append(base if seen[base] == 1 else f"{base}-{seen[base]}")
    return names


@lru_cache(maxsize=65536)
def _splits_cleanly(left: str, right: str) -> bool:
    """True when the two lexemes stay two tokens with no space between."""
    try:
        relexed = lex(left + right)
    except LexError:
        return False
    return [token.text for token in relexed.tokens] == [left, right]


def _boundary_guard(doc: LexedDocument):
    """Veto (0,0) predictions that would merge or re-split adjacent tokens."""
    tokens = doc.tokens

    def allow(i: int, pair: tuple[int, int]) -> bool:
        if pair != (0, 0) or i == 0:
            return True
        return _splits_cleanly(tokens[i - 1].text, tokens[i].text)

    return allow


def _ranked_with_scores(model, enc):
    """Per slot: [(pair, score), ...] best first, teacher-forced left context."""
    labels = enc.label_vocab.labels
    if isinstance(model, NgramModel):
        window = model.order - 1
        stream: list[int] = [model.bod_id] * window
        rows = []
        for i in range(len(enc)):
            context = stream[-window:] if window else []
            ranked = predict_spacing_ngram(model, context)
            rows.append([(labels[lid], score) for lid, score in ranked])
            stream.append(model.label_base + int(enc.label_ids[i]))
            stream.append(int(enc.token_ids[i]))
        return rows
    probs = predict_all(model, enc)
    order = np.argsort(-probs, axis=1, kind="stable")
    return [
        [(labels[int(lid)], float(probs[i, lid])) for lid in order[i]]
        for i in range(len(enc))
    ]


# ---------------------------------------------------------------------------
# Subcommands.


def cmd_lex(args: argparse.Namespace) -> int:
    options = _resolve_options(args, _LEX_OPTS)
    doc = lex(_read_source(args.input))
    _write_text(options["out"], export_token_stream(doc))
    return EXIT_OK


def cmd_stats(args: argparse.Namespace) -> int:
    options = _resolve_options(args, _STATS_OPTS)
    corpus = _gather_corpus(args, options)
    token_counts: Counter[str] = Counter()
    label_counts: Counter[tuple[int, int]] = Counter()
    for _, doc in corpus.documents:
        for label, token in doc.items:
            token_counts[token.text] += 1
            label_counts[label.pair] += 1
    total = sum(token_counts.values())
    lines = [
        f"documents: {len(corpus)}",
        f"tokens: {total} total, {len(token_counts)} distinct",
        f"labels: {total} total, {len(label_counts)} distinct",
        "top tokens:",
    ]
    ranked_tokens = sorted(token_counts.items(), key=lambda kv: (-kv[1], kv[0]))
    for text, count in ranked_tokens[: options["top"]]:
        lines.append(f"  {count}  {text}")
    lines.append("labels:")
    ranked_labels = sorted(label_counts.items(), key=lambda kv: (-kv[1], kv[0]))
    for pair, count in ranked_labels:
        lines.append(f"  {count}  ({pair[0]},{pair[1]})")
    sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_OK


def cmd_split(args: argparse.Namespace) -> int:
    options = _resolve_options(args, _SPLIT_OPTS)
    corpus = _gather_corpus(args, options)
    try:
        split = split_corpus(corpus, options["ratios"], options["seed"])
    except ValueError as exc:
        raise _UsageError(str(exc))
    _write_text(options["out"], write_split(corpus, split))
    return EXIT_OK


def cmd_train(args: argparse.Namespace) -> int:
    options = _resolve_options(args, _TRAIN_OPTS)
    if not options["out"]:
        raise _UsageError("--out is required: where to save the trained model")
    corpus = _gather_corpus(args, options)
    try:
        split = _resolve_split(corpus, options)
    except ValueError as exc:
        raise _UsageError(str(exc))
    train_idx = split.part("train")
    if not train_idx:
        raise _UsageError("the split has no training documents")
    train_lexed = [corpus.documents[i][1] for i in train_idx]
    try:
        vocab = build_vocab(train_lexed, min_count=options["min_count"])
    except ValueError as exc:
        raise _UsageError(str(exc))
    label_vocab = build_label_vocab(train_lexed)
    train_encs = encode_part(corpus, train_idx, vocab, label_vocab)

    if args.model_kind == "ngram":
        try:
            model = train_ngram(train_encs, order=options["order"], backoff_factor=options["backoff"])
        except ValueError as exc:
            raise _UsageError(str(exc))
        save_ngram(model, options["out"])
    else:
        val_encs = encode_part(corpus, split.part("validation"), vocab, label_vocab)
        try:
            config = TrainingConfig(
                learning_rate=options["learning_rate"],
                gradient_clip_norm=options["clip_norm"],
                max_epochs=options["max_epochs"],
                early_stop_patience=options["patience"],
                segment_length=options["segment_length"],
                segment_overlap=options["segment_overlap"],
                batch_size=options["batch_size"],
                seed=options["seed"],
            )
            model = init_brnn(
                vocab, label_vocab, options["d_emb"], options["d_hidden"], seed=options["seed"]
            )
        except ValueError as exc:
            raise _UsageError(str(exc))

        def progress(epoch: int, loss: float, val_acc: float) -> None:
            print(f"epoch {epoch}: loss {loss:.4f}  val-top1 {val_acc:.4f}", file=sys.stderr)

        model, _history = train_brnn(
            model, train_encs, val_encs, config,
            progress=None if options["quiet"] else progress,
        )
        save_brnn(model, options["out"])
    print(f"saved {args.model_kind} model to {options['out']}", file=sys.stderr)
    return EXIT_OK


def cmd_eval(args: argparse.Namespace) -> int:
    options = _resolve_options(args, _EVAL_OPTS)
    if not args.model:
        raise _UsageError("at least one --model is required")
    corpus = _gather_corpus(args, options)
    try:
        split = _resolve_split(corpus, options)
    except ValueError as exc:
        raise _UsageError(str(exc))
    part_idx = split.part(options["part"])
    if not part_idx:
        raise _UsageError(f"the split has no {options['part']} documents")

    models = [_load_model(path) for path in args.model]
    reports = []
    for model, name in zip(models, _predictor_names(models)):
        encs = encode_part(corpus, part_idx, model.vocab, model.label_vocab)
        reports.append(evaluate(_make_predictor(model, name), encs, split=options["part"]))

    human = render_human_table(reports)
    flat = render_flat_metrics(reports)
    if options["out"]:
        out_dir = Path(options["out"])
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "report.txt").write_text(human, encoding="utf-8")
        (out_dir / "metrics.txt").write_text(flat, encoding="utf-8")
        from .figures import save_report_figures

        figure_paths = save_report_figures(reports, out_dir, ks=options["topk"])
        written = [out_dir / "report.txt", out_dir / "metrics.txt", *figure_paths]
        print("wrote " + ", ".join(str(p) for p in written), file=sys.stderr)
    else:
        sys.stdout.write(human + "\n" + flat)

    if options["min_top1"] is not None:
        for report in reports:
            top1 = report.accuracy("all") or 0.0
            if top1 < options["min_top1"]:
                print(
                    f"{report.predictor}: top-1 accuracy {top1:.6f} "
                    f"is below --min-top1 {options['min_top1']:.6f}",
                    file=sys.stderr,
                )
                return EXIT_THRESHOLD
    return EXIT_OK


def _gradcheck_document(seed: int):
    """A short random lexable snippet.

    Short on purpose: in a long document, parameters far from the probed
    slot have nearly-zero gradients, where finite differences are all
    rounding noise and say nothing about gradient correctness.
    """
    pool = ("move", "=>", "x", "y", ":", ".", "Lemma", "forall", "rewrite", "H1", "0", ",")
    seps = ("", " ", "  ", "\n", "\n\n  ")
    rng = np.random.default_rng(seed & ((1 << 64) - 1))
    parts = []
    for _ in range(16):
        parts.append(seps[int(rng.integers(0, len(seps)))])
        parts.append(pool[int(rng.integers(0, len(pool)))])
    return lex("".join(parts))


def cmd_gradcheck(args: argparse.Namespace) -> int:
    options = _resolve_options(args, _GRADCHECK_OPTS)
    doc = _gradcheck_document(options["seed"])
    vocab = build_vocab([doc], min_count=1)
    label_vocab = build_label_vocab([doc])
    enc = encode(doc, vocab, label_vocab)
    try:
        model = init_brnn(
            vocab, label_vocab, options["d_emb"], options["d_hidden"], seed=options["seed"]
        )
        error = gradient_check(
            model,
            enc,
            slot=2 * (len(enc) // 2),
            epsilon=options["epsilon"],
            samples=options["samples"],
            seed=options["seed"],
        )
    except ValueError as exc:
        raise _UsageError(str(exc))
    print(f"max relative gradient error: {error:.3e} (tolerance {options['tolerance']:.3e})")
    if error > options["tolerance"]:
        print("gradient check failed", file=sys.stderr)
        return EXIT_THRESHOLD
    return EXIT_OK


def cmd_suggest(args: argparse.Namespace) -> int:
    options = _resolve_options(args, _SUGGEST_OPTS)
    if not options["model"]:
        raise _UsageError("--model is required")
    model = _load_model(options["model"])
    for path in args.inputs:
        doc = lex(_read_source(path))
        enc = encode(doc, model.vocab, model.label_vocab, path=path)
        for i, ranked in enumerate(_ranked_with_scores(model, enc)):
            actual = doc.items[i][0].pair
            best = ranked[0][0]
            if best == actual:
                continue
            token = doc.items[i][1]
            alternatives = ", ".join(
                f"({pair[0]},{pair[1]})@{score:.3g}" for pair, score in ranked[:3]
            )
            print(
                f"{path}:{token.line}:{token.col}  "
                f"actual=({actual[0]},{actual[1]})  "
                f"suggested=({best[0]},{best[1]})  "
                f"top3=[{alternatives}]"
            )
    return EXIT_OK


def cmd_reformat(args: argparse.Namespace) -> int:
    options = _resolve_options(args, _REFORMAT_OPTS)
    if not options["model"]:
        raise _UsageError("--model is required")
    model = _load_model(options["model"])
    doc = lex(_read_source(args.input))
    enc = encode(doc, model.vocab, model.label_vocab, path=args.input)
    guard = _boundary_guard(doc)
    if isinstance(model, NgramModel):
        pairs = ngram_greedy_labels(model, enc, guard)
    else:
        pairs = brnn_greedy_labels(model, enc, guard)
    items = tuple(
        (SpacingLabel(pair[0], pair[1]), token)
        for pair, (_, token) in zip(pairs, doc.items)
    )
    reformatted = LexedDocument(items=items, sentence_ends=doc.sentence_ends)
    _write_text(options["out"], render_canonical(reformatted))
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser assembly.


def build_parser() -> _ArgumentParser:
    common = _ArgumentParser(add_help=False)
    common.add_argument(
        "--config", default=None, metavar="FILE",
        help="key = value option file; command-line flags win",
    )
    parser = _ArgumentParser(
        prog="spacefmt",
        description="Learn whitespace conventions from Coq-like source and "
        "suggest or apply spacing per inter-token slot.",
    )
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)

    def add(name: str, func, opts: list[_Opt], help_text: str) -> _ArgumentParser:
        p = sub.add_parser(name, parents=[common], help=help_text, description=help_text)
        _add_options(p, opts)
        p.set_defaults(func=func)
        return p

    p = add("lex", cmd_lex, _LEX_OPTS, "lex one source file into the token-stream format")
    p.add_argument("input", metavar="FILE", help="source file to lex")

    p = add("stats", cmd_stats, _STATS_OPTS, "token and spacing-label frequency summary")
    p.add_argument("inputs", nargs="*", metavar="FILE", help="input files")

    p = add("split", cmd_split, _SPLIT_OPTS, "write a seeded train/validation/test split record")
    p.add_argument("inputs", nargs="*", metavar="FILE", help="input files")

    p = add("train", cmd_train, _TRAIN_OPTS, "train a model on the training part of a corpus")
    p.add_argument("model_kind", choices=("ngram", "brnn"), help="which model to train")
    p.add_argument("inputs", nargs="*", metavar="FILE", help="input files")

    p = add("eval", cmd_eval, _EVAL_OPTS, "score trained models on one split part")
    p.add_argument(
        "--model", action="append", default=None, metavar="FILE",
        help="trained model file; repeat to compare models (required)",
    )
    p.add_argument("inputs", nargs="*", metavar="FILE", help="input files")

    add("gradcheck", cmd_gradcheck, _GRADCHECK_OPTS,
        "compare analytic gradients against finite differences on a small fresh model")

    p = add("suggest", cmd_suggest, _SUGGEST_OPTS,
            "print linter-style lines where the model's top choice differs from the file")
    p.add_argument("inputs", nargs="+", metavar="FILE", help="source files to check")

    p = add("reformat", cmd_reformat, _REFORMAT_OPTS,
            "rewrite a file's whitespace with the model's greedy predictions")
    p.add_argument("input", metavar="FILE", help="source file to reformat")

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args, extra = parser.parse_known_args(argv)
        # argparse cannot interleave options with a greedy positional list
        # ("train ngram --out m.sfng a.v b.v" strands the files), so fold
        # leftover non-option arguments back into the input list.
        if extra:
            if any(item.startswith("-") for item in extra) or not hasattr(args, "inputs"):
                parser.error(f"unrecognized arguments: {' '.join(extra)}")
            args.inputs = list(args.inputs) + extra
        if not hasattr(args, "func"):
            parser.error("a command is required")
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CorpusIoError, VocabMismatchError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (LexError, FormatError, EmptyCorpusError, DegenerateSplitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (ModelIoError, DivergenceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MODEL


if __name__ == "__main__":
    sys.exit(main())
