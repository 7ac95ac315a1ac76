"""Scoring: slot categories, tallies, report rendering, and figures."""

import numpy as np
import pytest

from spacefmt import (
    BrnnPredictor,
    EvalReport,
    NgramPredictor,
    ReportStyle,
    SlotPosition,
    VocabMismatchError,
    build_label_vocab,
    build_vocab,
    categorize,
    encode,
    evaluate,
    init_brnn,
    lex,
    render_flat_metrics,
    render_human_table,
    render_report,
    train_ngram,
)
from spacefmt.evaluation import Tally
from spacefmt.figures import save_report_figures

from conftest import random_source


def _encode_all(sources, min_count=1):
    docs = [lex(src) for src in sources]
    vocab = build_vocab(docs, min_count=min_count)
    lv = build_label_vocab(docs)
    return [encode(d, vocab, lv) for d in docs]


class TestCategorize:
    def test_in_sentence_pairs(self):
        doc = lex("move=> x.")
        c1 = categorize(doc, 1)
        assert c1.position is SlotPosition.IN_SENTENCE
        assert (c1.left_kind.value, c1.right_kind.value) == ("L", "L")
        c2 = categorize(doc, 2)
        assert (c2.left_kind.value, c2.right_kind.value) == ("L", "O")

    def test_document_start_is_between_sentences(self):
        doc = lex("move=> x.")
        c0 = categorize(doc, 0)
        assert c0.position is SlotPosition.BETWEEN_SENTENCE
        assert c0.left_kind is None

    def test_slot_after_sentence_end_is_between(self):
        doc = lex("Proof. Qed.")
        c = categorize(doc, 2)  # the slot in front of "Qed"
        assert c.position is SlotPosition.BETWEEN_SENTENCE
        assert c.qed_flag is True
        mid = categorize(doc, 1)  # in front of the first "."
        assert mid.position is SlotPosition.IN_SENTENCE
        assert mid.qed_flag is False


class _FixedRanker:
    """Test double: ranks every slot with one fixed id order."""

    def __init__(self, order, name="fixed"):
        self.order = list(order)
        self.name = name

    def ranked(self, enc):
        row = np.array(self.order, dtype=np.int64)
        return np.tile(row, (len(enc), 1))


class _OracleRanker:
    """Test double: always puts the true label first."""

    name = "oracle"

    def __init__(self, n_labels):
        self.n_labels = n_labels

    def ranked(self, enc):
        rows = np.tile(np.arange(self.n_labels, dtype=np.int64), (len(enc), 1))
        for i, true in enumerate(enc.label_ids):
            row = rows[i]
            j = int(np.where(row == true)[0][0])
            row[0], row[j] = row[j], row[0]
        return rows


class TestEvaluate:
    def _docs(self, seed=13, n=8):
        rng = np.random.default_rng(seed)
        return _encode_all([random_source(rng) for _ in range(n)] + ["move=> x. Qed."])

    def test_oracle_scores_one_everywhere(self):
        encs = self._docs()
        report = evaluate(_OracleRanker(len(encs[0].label_vocab)), encs, split="test")
        for key, tally in report.tallies.items():
            if tally.total:
                assert report.accuracy(key) == 1.0, key

    def test_constant_ranker_matches_label_frequencies(self):
        encs = self._docs()
        n_labels = len(encs[0].label_vocab)
        ranker = _FixedRanker(range(n_labels))
        report = evaluate(ranker, encs)
        all_ids = np.concatenate([e.label_ids for e in encs])
        all_oov = np.concatenate([e.label_oov for e in encs])
        want_top1 = ((all_ids == 0) & ~all_oov).mean()
        want_top2 = (np.isin(all_ids, (0, 1)) & ~all_oov).mean()
        assert report.accuracy("all") == pytest.approx(want_top1)
        assert report.accuracy("top-2") == pytest.approx(want_top2)

    def test_rank_counts_never_decrease_with_k(self):
        encs = self._docs(seed=29)
        report = evaluate(_FixedRanker(range(len(encs[0].label_vocab))), encs)
        t = report.tallies
        assert (
            t["all"].correct
            <= t["top-2"].correct
            <= t["top-3"].correct
            <= t["top-5"].correct
        )
        assert t["all"].total == t["top-5"].total

    def test_positions_partition_all_slots(self):
        encs = self._docs(seed=31)
        report = evaluate(_FixedRanker(range(len(encs[0].label_vocab))), encs)
        t = report.tallies
        assert t["insent"].total + t["betsent"].total == t["all"].total

    def test_pair_totals_sum_to_left_kind_aggregates(self):
        encs = self._docs(seed=37)
        report = evaluate(_FixedRanker(range(len(encs[0].label_vocab))), encs)
        for kind in ("G", "L", "V"):
            pair_total = sum(
                tally.total
                for key, tally in report.tallies.items()
                if "-" in key and not key.startswith("top-") and key[0] == kind
            )
            assert pair_total == report.tallies[kind].total

    def test_out_of_vocabulary_labels_miss_at_every_rank(self):
        base = [lex("move=> x.")] * 2
        vocab = build_vocab(base, min_count=1)
        lv = build_label_vocab(base)
        # (2, 0) is not in the label vocabulary.
        enc = encode(lex("move\n\nmove."), vocab, lv)
        assert enc.label_oov.any()
        report = evaluate(_OracleRanker(len(lv)), [enc])
        n_oov = int(enc.label_oov.sum())
        assert report.tallies["all"].correct == len(enc) - n_oov
        assert report.tallies["top-5"].correct == len(enc) - n_oov

    def test_model_predictors_demand_matching_vocabularies(self):
        encs_a = _encode_all(["move=> x."] * 2)
        encs_b = _encode_all(["rewrite H."] * 2)
        ngram = train_ngram(encs_a, order=2)
        with pytest.raises(VocabMismatchError):
            NgramPredictor(ngram).ranked(encs_b[0])
        brnn = init_brnn(encs_a[0].vocab, encs_a[0].label_vocab, 4, 6, seed=0)
        with pytest.raises(VocabMismatchError):
            BrnnPredictor(brnn).ranked(encs_b[0])

    def test_model_predictor_ranked_shape(self):
        encs = _encode_all(["move=> x."] * 3)
        ngram = train_ngram(encs, order=3)
        ranked = NgramPredictor(ngram).ranked(encs[0])
        assert ranked.shape == (4, len(encs[0].label_vocab))
        assert sorted(ranked[0].tolist()) == list(range(len(encs[0].label_vocab)))
        brnn = init_brnn(encs[0].vocab, encs[0].label_vocab, 4, 6, seed=0)
        ranked = BrnnPredictor(brnn).ranked(encs[0])
        assert ranked.shape == (4, len(encs[0].label_vocab))


def _report_from_counts(predictor, split, counts):
    tallies = {}
    for key, (correct, total) in counts.items():
        tallies[key] = Tally(correct=correct, total=total)
    return EvalReport(predictor=predictor, split=split, tallies=tallies)


class TestRendering:
    def test_human_table_frozen_row(self):
        report = _report_from_counts(
            "brnn",
            "test",
            {"all": (968, 1000), "top-3": (997, 1000)},
        )
        text = render_human_table([report])
        lines = text.splitlines()
        assert lines[0].startswith("#")
        assert any("test" in line for line in lines if line.startswith("#"))
        assert "Model  Top-1  Top-3" in lines
        assert "brnn  96.8%  99.7%" in lines

    def test_human_table_missing_categories_show_na(self):
        report = _report_from_counts("ngram", "test", {"all": (1, 2)})
        text = render_human_table([report])
        row = [l for l in text.splitlines() if l.startswith("ngram")][0]
        assert "50.0%" in row and "n/a" in row

    def test_flat_metrics_frozen_format(self):
        report = _report_from_counts(
            "ngram",
            "test",
            {"all": (3, 4), "insent": (1, 2), "betsent": (2, 2), "G": (0, 0)},
        )
        text = render_flat_metrics([report])
        lines = text.splitlines()
        assert lines == sorted(lines)
        assert "ngram-test-accuracy-all 0.750000" in lines
        assert "ngram-test-accuracy-insent 0.500000" in lines
        assert "ngram-test-accuracy-betsent 1.000000" in lines
        # Empty categories are omitted entirely.
        assert not any("accuracy-G" in line for line in lines)

    def test_flat_metrics_cover_both_models(self):
        a = _report_from_counts("ngram", "test", {"all": (1, 2)})
        b = _report_from_counts("brnn", "test", {"all": (2, 2)})
        text = render_flat_metrics([a, b])
        assert "ngram-test-accuracy-all 0.500000" in text
        assert "brnn-test-accuracy-all 1.000000" in text

    def test_render_report_dispatch(self):
        report = _report_from_counts("m", "validation", {"all": (1, 1)})
        human = render_report(report, ReportStyle.HUMAN_TABLE)
        flat = render_report(report, ReportStyle.FLAT_METRICS)
        assert "Model" in human
        assert "m-validation-accuracy-all 1.000000" in flat

    def test_accuracy_none_for_empty_tally(self):
        report = _report_from_counts("m", "test", {"all": (0, 0)})
        assert report.accuracy("all") is None
        assert report.accuracy("not-a-key") is None


class TestFigures:
    def test_figures_written_as_png(self, tmp_path):
        rng = np.random.default_rng(43)
        encs = _encode_all([random_source(rng) for _ in range(6)] + ["move=> x."])
        ngram = train_ngram(encs, order=3)
        report = evaluate(NgramPredictor(ngram), encs)
        paths = save_report_figures([report], tmp_path)
        assert [p.name for p in paths] == [
            "accuracy_categories.png",
            "topk_accuracy.png",
        ]
        for path in paths:
            blob = path.read_bytes()
            assert blob[:8] == b"\x89PNG\r\n\x1a\n"
            assert len(blob) > 1000

    def test_topk_subset(self, tmp_path):
        rng = np.random.default_rng(47)
        encs = _encode_all([random_source(rng) for _ in range(5)] + ["move=> x."])
        ngram = train_ngram(encs, order=2)
        report = evaluate(NgramPredictor(ngram), encs)
        paths = save_report_figures([report], tmp_path, ks=(1, 3))
        assert all(p.exists() for p in paths)
