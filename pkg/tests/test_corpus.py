"""Corpus handling: vocabularies, splits, encoding, and file ingestion."""

import numpy as np
import pytest

from spacefmt import (
    CorpusIoError,
    DegenerateSplitError,
    EmptyCorpusError,
    LabelVocabulary,
    Vocabulary,
    build_corpus,
    build_label_vocab,
    build_vocab,
    decode,
    encode,
    export_token_stream,
    lex,
    read_manifest,
    read_split,
    read_vocab,
    split_corpus,
    write_split,
    write_vocab,
)
from spacefmt.corpus import UNK_ID, UNK_TOKEN


class TestVocabulary:
    def test_frozen_ordering(self):
        # Equal counts fall back to lexicographic order after the UNK slot.
        docs = [lex("move=> x.")] * 3
        vocab = build_vocab(docs, min_count=2)
        assert vocab.tokens == (UNK_TOKEN, ".", "=>", "move", "x")
        assert vocab.counts == (0, 3, 3, 3, 3)
        assert vocab.id_of("move") == 3
        assert vocab.id_of("never-seen") == UNK_ID
        assert "move" in vocab and "zzz" not in vocab

    def test_min_count_drops_rare_tokens_to_unk(self):
        docs = [lex("move=> x."), lex("move=> y.")]
        vocab = build_vocab(docs, min_count=2)
        assert vocab.tokens == (UNK_TOKEN, ".", "=>", "move")
        assert vocab.counts[0] == 2  # the dropped x and y occurrences
        assert vocab.id_of("x") == UNK_ID

    def test_more_frequent_tokens_get_smaller_ids(self):
        docs = [lex("a a a b b c")]
        vocab = build_vocab(docs, min_count=1)
        assert vocab.tokens == (UNK_TOKEN, "a", "b", "c")

    def test_min_count_must_be_positive(self):
        with pytest.raises(ValueError):
            build_vocab([lex("x")], min_count=0)

    def test_write_read_round_trip(self):
        vocab = build_vocab([lex("move=> x.")] * 3, min_count=2)
        back = read_vocab(write_vocab(vocab), min_count=2)
        assert back.tokens == vocab.tokens
        assert back.counts == vocab.counts


class TestLabelVocabulary:
    def test_frozen_ordering_and_fallback(self):
        docs = [lex("move=> x.")] * 3
        lv = build_label_vocab(docs)
        assert lv.labels == ((0, 0), (0, 1))
        assert lv.counts == (9, 3)
        assert lv.fallback_id == 0
        assert lv.id_of((0, 1)) == 1
        assert lv.id_of((3, 40)) is None
        assert (0, 0) in lv and (2, 2) not in lv

    def test_empty_corpus_rejected(self):
        with pytest.raises(EmptyCorpusError):
            build_label_vocab([lex("")])


class TestEncoding:
    def test_encode_decode(self):
        docs = [lex("move=> x.")] * 3
        vocab = build_vocab(docs, min_count=2)
        lv = build_label_vocab(docs)
        enc = encode(docs[0], vocab, lv, path="p")
        assert enc.token_ids.tolist() == [3, 2, 4, 1]
        assert enc.label_ids.tolist() == [0, 0, 1, 0]
        assert not enc.label_oov.any()
        texts, pairs = decode(enc)
        assert texts == ("move", "=>", "x", ".")
        assert pairs == ((0, 0), (0, 0), (0, 1), (0, 0))

    def test_out_of_vocabulary_tokens_and_labels(self):
        docs = [lex("move=> x.")] * 3
        vocab = build_vocab(docs, min_count=2)
        lv = build_label_vocab(docs)
        other = lex("zap\n\nmove.")
        enc = encode(other, vocab, lv)
        assert enc.token_ids[0] == UNK_ID
        # The (2, 0) label is unseen: the slot keeps the fallback id and is
        # flagged so scoring can count it as a miss at every rank.
        assert enc.label_oov.tolist() == [False, True, False]
        assert enc.label_ids[1] == lv.fallback_id


def _write_files(directory, sources):
    paths = []
    for i, src in enumerate(sources):
        path = directory / f"doc_{i:02d}.v"
        path.write_text(src, encoding="utf-8")
        paths.append(path)
    return paths


class TestSplit:
    def _corpus(self, tmp_path, n=10):
        paths = _write_files(tmp_path, [f"x{i}." for i in range(n)])
        corpus, skipped = build_corpus(paths)
        assert skipped == ()
        return corpus

    def test_sizes_follow_ratios(self, tmp_path):
        corpus = self._corpus(tmp_path, 10)
        split = split_corpus(corpus, (0.8, 0.1, 0.1), seed=0)
        assert (len(split.train), len(split.validation), len(split.test)) == (8, 1, 1)
        used = sorted(split.train + split.validation + split.test)
        assert used == list(range(10))

    def test_largest_remainder_rounding(self, tmp_path):
        corpus = self._corpus(tmp_path, 5)
        split = split_corpus(corpus, (0.5, 0.25, 0.25), seed=1)
        assert (len(split.train), len(split.validation), len(split.test)) == (3, 1, 1)

    def test_same_seed_same_split(self, tmp_path):
        corpus = self._corpus(tmp_path)
        a = split_corpus(corpus, seed=7)
        b = split_corpus(corpus, seed=7)
        assert (a.train, a.validation, a.test) == (b.train, b.validation, b.test)

    def test_different_seed_different_split(self, tmp_path):
        corpus = self._corpus(tmp_path, 30)
        a = split_corpus(corpus, seed=1)
        b = split_corpus(corpus, seed=2)
        assert (a.train, a.validation, a.test) != (b.train, b.validation, b.test)

    def test_partition_ignores_listing_order(self, tmp_path):
        paths = _write_files(tmp_path, [f"x{i}." for i in range(10)])
        corpus_fwd, _ = build_corpus(paths)
        corpus_rev, _ = build_corpus(list(reversed(paths)))

        def part_paths(corpus, part):
            return {corpus.documents[i][0] for i in part}

        a = split_corpus(corpus_fwd, seed=5)
        b = split_corpus(corpus_rev, seed=5)
        assert part_paths(corpus_fwd, a.train) == part_paths(corpus_rev, b.train)
        assert part_paths(corpus_fwd, a.test) == part_paths(corpus_rev, b.test)

    def test_empty_part_at_positive_ratio_rejected(self, tmp_path):
        corpus = self._corpus(tmp_path, 2)
        with pytest.raises(DegenerateSplitError) as info:
            split_corpus(corpus, (0.8, 0.1, 0.1), seed=0)
        assert "zero documents" in str(info.value)

    def test_ratio_validation(self, tmp_path):
        corpus = self._corpus(tmp_path, 4)
        with pytest.raises(ValueError):
            split_corpus(corpus, (0.5, 0.5, 0.5))
        with pytest.raises(ValueError):
            split_corpus(corpus, (1.1, -0.05, -0.05))

    def test_split_record_round_trip(self, tmp_path):
        corpus = self._corpus(tmp_path)
        split = split_corpus(corpus, seed=3)
        back = read_split(corpus, write_split(corpus, split))
        assert back.train == split.train
        assert back.validation == split.validation
        assert back.test == split.test

    def test_part_accessor(self, tmp_path):
        corpus = self._corpus(tmp_path)
        split = split_corpus(corpus, seed=0)
        assert split.part("train") == split.train
        with pytest.raises(ValueError):
            split.part("holdout")


class TestBuildCorpus:
    def test_unparseable_files_are_skipped_with_reasons(self, tmp_path):
        good = tmp_path / "good.v"
        good.write_text("x.", encoding="utf-8")
        bad = tmp_path / "bad.v"
        bad.write_text("(* open", encoding="utf-8")
        corpus, skipped = build_corpus([good, bad])
        assert len(corpus) == 1
        assert len(skipped) == 1
        assert skipped[0][0].endswith("bad.v")
        assert skipped[0][1]  # a human-readable reason

    def test_everything_skipped_raises(self, tmp_path):
        bad = tmp_path / "bad.v"
        bad.write_text("(* open", encoding="utf-8")
        with pytest.raises(EmptyCorpusError):
            build_corpus([bad])

    def test_missing_path_raises(self, tmp_path):
        with pytest.raises(CorpusIoError):
            build_corpus([tmp_path / "nope.v"])

    def test_duplicate_paths_collapse(self, tmp_path):
        path = tmp_path / "one.v"
        path.write_text("x.", encoding="utf-8")
        corpus, _ = build_corpus([path, path])
        assert len(corpus) == 1

    def test_import_mode_reads_token_streams(self, tmp_path):
        doc = lex("move=> x.")
        stream = tmp_path / "doc.st"
        stream.write_text(export_token_stream(doc), encoding="utf-8")
        corpus, skipped = build_corpus([stream], mode="import")
        assert skipped == ()
        assert corpus.documents[0][1] == doc
        assert corpus.origin == "import"


class TestManifest:
    def test_read_manifest(self):
        text = "# comment\n\na.v\n  b.v  \n# more\nc.v\n"
        assert read_manifest(text) == ["a.v", "b.v", "c.v"]
