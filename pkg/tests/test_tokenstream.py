"""Token-stream serialization: frozen format, escapes, and validation."""

import numpy as np
import pytest

from spacefmt import (
    FormatError,
    LexedDocument,
    SpacingLabel,
    Token,
    TokenKind,
    export_token_stream,
    import_token_stream,
    lex,
    render_exact,
)
from spacefmt.tokenstream import HEADER, escape_field, unescape_field


class TestFrozenFormat:
    def test_export_tactic_line(self):
        doc = lex("move=> x.")
        expected = (
            "spacefmt-tokens v1\n"
            "L 0 0\n"
            "T L 1 0 move\n"
            "L 0 0\n"
            "T L 1 4 =>\n"
            "L 0 1 \\s\n"
            "T O 1 7 x\n"
            "L 0 0\n"
            "T O 1 8 .\n"
            "S 3\n"
        )
        assert export_token_stream(doc) == expected

    def test_trailing_whitespace_becomes_dangling_spacing_record(self):
        text = export_token_stream(lex("x \t"))
        lines = text.splitlines()
        assert lines[-2] == "L 0 2 \\s\\t"  # dangling record before S
        assert lines[-1] == "S 0"
        back = import_token_stream(text)
        assert back.trailing == " \t"

    def test_synthesized_label_serializes_raw_as_dash(self):
        doc = LexedDocument(
            items=((SpacingLabel(1, 2), Token("x", TokenKind.OTHER, 1, 0)),),
            sentence_ends=(0,),
        )
        text = export_token_stream(doc)
        assert "L 1 2 -" in text.splitlines()
        back = import_token_stream(text)
        assert back.labels[0].raw is None
        assert back.labels[0].pair == (1, 2)

    def test_empty_raw_field_is_omitted(self):
        text = export_token_stream(lex("x"))
        assert text.splitlines()[1] == "L 0 0"

    def test_empty_document(self):
        text = export_token_stream(lex(""))
        assert text == HEADER + "\n"
        assert import_token_stream(text) == lex("")


class TestEscapes:
    def test_escape_round_trip(self):
        raw = "a b\tc\nd\\e\rf\fg\vh"
        escaped = escape_field(raw)
        assert " " not in escaped and "\n" not in escaped and "\t" not in escaped
        assert unescape_field(escaped, 1) == raw

    def test_escape_frozen(self):
        assert escape_field("a b\tc\nd\\e") == "a\\sb\\tc\\nd\\\\e"

    def test_unknown_escape_rejected(self):
        with pytest.raises(FormatError) as info:
            unescape_field("a\\qb", 7)
        assert info.value.line == 7

    def test_dangling_backslash_rejected(self):
        with pytest.raises(FormatError):
            unescape_field("oops\\", 3)


class TestRoundTrip:
    def test_import_inverts_export(self, soup):
        rng = np.random.default_rng(99)
        for _ in range(200):
            doc = lex(soup(rng))
            back = import_token_stream(export_token_stream(doc))
            assert back == doc
            assert render_exact(back) == render_exact(doc)

    def test_round_trip_keeps_exotic_whitespace(self):
        src = "x\r\n\f\vy \t."
        doc = lex(src)
        assert render_exact(import_token_stream(export_token_stream(doc))) == src


def _bad(text):
    with pytest.raises(FormatError) as info:
        import_token_stream(text)
    return info.value


class TestValidation:
    def test_wrong_header(self):
        err = _bad("something else\n")
        assert err.line == 1

    def test_token_without_spacing_record(self):
        err = _bad(HEADER + "\nT O 1 0 x\n")
        assert err.line == 2

    def test_two_spacing_records_in_a_row(self):
        _bad(HEADER + "\nL 0 0\nL 0 1 \\s\nT O 1 0 x\nS 0\n")

    def test_bad_kind_letter(self):
        _bad(HEADER + "\nL 0 0\nT Q 1 0 x\nS 0\n")

    def test_bad_integer(self):
        _bad(HEADER + "\nL zero 0\nT O 1 0 x\nS 0\n")

    def test_label_out_of_range(self):
        _bad(HEADER + "\nL 4 0 -\nT O 1 0 x\nS 0\n")
        _bad(HEADER + "\nL 0 41 -\nT O 1 0 x\nS 0\n")

    def test_position_out_of_range(self):
        _bad(HEADER + "\nL 0 0\nT O 0 0 x\nS 0\n")
        _bad(HEADER + "\nL 0 0\nT O 1 -1 x\nS 0\n")

    def test_empty_lexeme(self):
        _bad(HEADER + "\nL 0 0\nT O 1 0 \nS 0\n")

    def test_raw_with_non_whitespace(self):
        _bad(HEADER + "\nL 0 1 q\nT O 1 0 x\nS 0\n")

    def test_raw_disagrees_with_counts(self):
        _bad(HEADER + "\nL 2 0 \\s\nT O 1 0 x\nS 0\n")

    def test_unknown_record(self):
        _bad(HEADER + "\nZ what\n")

    def test_sentence_index_out_of_range(self):
        _bad(HEADER + "\nL 0 0\nT O 1 0 x\nS 5\n")

    def test_sentence_indices_must_increase(self):
        _bad(
            HEADER
            + "\nL 0 0\nT O 1 0 .\nL 0 1 \\s\nT O 1 2 .\nS 1\nS 0\n"
        )

    def test_sentence_index_must_point_at_a_closer(self):
        # Index 0 points at "x", which is neither "." nor the final token.
        _bad(
            HEADER
            + "\nL 0 0\nT O 1 0 x\nL 0 1 \\s\nT O 1 2 .\nS 0\nS 1\n"
        )

    def test_final_token_must_close_last_sentence(self):
        _bad(HEADER + "\nL 0 0\nT O 1 0 x\n")

    def test_dangling_record_needs_raw_text(self):
        _bad(HEADER + "\nL 0 0\nT O 1 0 x\nL 0 1 -\nS 0\n")

    def test_sentence_record_in_empty_document(self):
        _bad(HEADER + "\nS 0\n")
