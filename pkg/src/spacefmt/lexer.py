"""Lexing Coq-style source into an alternating spacing/token stream.

A lexed document alternates spacing labels and classified tokens and keeps
the raw whitespace between tokens, so the input can be reproduced byte for
byte. Spacing is quantized to a (newlines, horizontal) pair: newlines are
clamped to 3 ("3 or more"), the horizontal count to 40 ("40 or more").
When at least one newline separates two tokens, the horizontal value is the
indentation column of the following token; otherwise it is the length of
the space run. Tabs count as one horizontal unit.

Sentences end at a "." token that is followed by whitespace or end of
input; a "." inside a qualified name is an ordinary token.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from importlib import resources

from .errors import LexError, MissingRawError

MAX_NEWLINES = 3
MAX_HORIZONTAL = 40

_WHITESPACE = frozenset(" \t\n\r\f\v")

# Longest match wins; every two-character operator is tried before the
# single punctuation characters.
_TWO_CHAR_OPS = ("=>", "->", "<-", ":=", "::", "==", "<=", ">=", "<>", "||", "&&")
# '"' is absent (it opens a string literal) and '_' is absent (it opens an
# identifier).
_SINGLE_PUNCT = frozenset("!#$%&'()*+,-./:;<=>?@[\\]^`{|}~")


class TokenKind(enum.Enum):
    GALLINA = "G"
    LTAC = "L"
    VERNACULAR = "V"
    COMMENT = "C"
    OTHER = "O"


_KIND_BY_CHAR = {kind.value: kind for kind in TokenKind}


def _load_table(name: str) -> frozenset[str]:
    text = resources.files("spacefmt.data").joinpath(name).read_text(encoding="utf-8")
    entries = []
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            entries.append(line)
    return frozenset(entries)


_VERNACULAR_TABLE = _load_table("vernacular_keywords.txt")
_LTAC_TABLE = _load_table("ltac_keywords.txt")
_GALLINA_TABLE = _load_table("gallina_keywords.txt")


def classify_token(lexeme: str, sentence_initial: bool = False) -> TokenKind:
    """Classify a non-comment lexeme by keyword table.

    Unknown identifiers fall back to OTHER, except that a capitalized
    identifier at the start of a sentence is taken to be a command and
    classified VERNACULAR.
    """
    if not lexeme:
        raise ValueError("cannot classify an empty lexeme")
    if lexeme in _VERNACULAR_TABLE:
        return TokenKind.VERNACULAR
    if lexeme in _LTAC_TABLE:
        return TokenKind.LTAC
    if lexeme in _GALLINA_TABLE:
        return TokenKind.GALLINA
    first = lexeme[0]
    if sentence_initial and first.isascii() and first.isupper():
        return TokenKind.VERNACULAR
    return TokenKind.OTHER


def quantize_raw(raw: str) -> tuple[int, int]:
    """Quantize a raw whitespace run to a (newlines, horizontal) pair."""
    newlines = raw.count("\n")
    if newlines:
        horizontal = len(raw) - (raw.rfind("\n") + 1)
    else:
        horizontal = len(raw)
    return (min(newlines, MAX_NEWLINES), min(horizontal, MAX_HORIZONTAL))


@dataclass(frozen=True)
class SpacingLabel:
    """Quantized spacing, optionally backed by the exact raw whitespace."""

    newlines: int
    horizontal: int
    raw: str | None = None

    @property
    def pair(self) -> tuple[int, int]:
        return (self.newlines, self.horizontal)

    @classmethod
    def from_raw(cls, raw: str) -> "SpacingLabel":
        newlines, horizontal = quantize_raw(raw)
        return cls(newlines, horizontal, raw)


@dataclass(frozen=True)
class Token:
    text: str
    kind: TokenKind
    line: int
    col: int


@dataclass(frozen=True)
class LexedDocument:
    """Alternating (label, token) items plus sentence boundaries.

    ``items[i]`` holds the spacing that precedes token i; the first label
    covers whitespace before the first token and may be the empty label.
    ``trailing`` is raw whitespace after the last token and is not a
    prediction slot. ``sentence_ends`` is strictly increasing; each entry
    points at a "." token that closes a sentence or at the final token.
    """

    items: tuple[tuple[SpacingLabel, Token], ...]
    sentence_ends: tuple[int, ...]
    trailing: str = ""

    def __len__(self) -> int:
        return len(self.items)

    @property
    def tokens(self) -> tuple[Token, ...]:
        return tuple(token for _, token in self.items)

    @property
    def labels(self) -> tuple[SpacingLabel, ...]:
        return tuple(label for label, _ in self.items)

    def sentence_starts(self) -> frozenset[int]:
        """Token indices that begin a sentence."""
        if not self.items:
            return frozenset()
        starts = {0}
        for end in self.sentence_ends:
            if end + 1 < len(self.items):
                starts.add(end + 1)
        return frozenset(starts)


def _advance_position(text: str, line: int, col: int) -> tuple[int, int]:
    newlines = text.count("\n")
    if newlines:
        return line + newlines, len(text) - (text.rfind("\n") + 1)
    return line, col + len(text)


def _scan_comment(source: str, pos: int, line: int, col: int) -> str:
    # pos sits on "(*"; comments nest.
    depth = 1
    i = pos + 2
    n = len(source)
    while i < n:
        if source.startswith("*)", i):
            depth -= 1
            i += 2
            if depth == 0:
                return source[pos:i]
        elif source.startswith("(*", i):
            depth += 1
            i += 2
        else:
            i += 1
    raise LexError("unterminated comment", line, col)


def _scan_string(source: str, pos: int, line: int, col: int) -> str:
    # pos sits on the opening quote; a doubled quote is an escaped quote.
    i = pos + 1
    n = len(source)
    while i < n:
        if source[i] == '"':
            if i + 1 < n and source[i + 1] == '"':
                i += 2
                continue
            return source[pos : i + 1]
        i += 1
    raise LexError("unterminated string literal", line, col)


def lex(source: str) -> LexedDocument:
    """Lex source text into a document; raises LexError on bad input."""
    items: list[tuple[SpacingLabel, Token]] = []
    ends: list[int] = []
    pos = 0
    line = 1
    col = 0
    n = len(source)
    sentence_initial = True
    trailing = ""

    while True:
        ws_begin = pos
        while pos < n and source[pos] in _WHITESPACE:
            pos += 1
        raw = source[ws_begin:pos]
        line, col = _advance_position(raw, line, col)
        if pos >= n:
            trailing = raw
            break

        tok_line, tok_col = line, col
        ch = source[pos]
        if source.startswith("(*", pos):
            lexeme = _scan_comment(source, pos, tok_line, tok_col)
            kind = TokenKind.COMMENT
        elif ch == '"':
            lexeme = _scan_string(source, pos, tok_line, tok_col)
            kind = TokenKind.OTHER
        elif ch.isascii() and (ch.isalpha() or ch == "_"):
            end = pos + 1
            while end < n:
                c = source[end]
                if c.isascii() and (c.isalnum() or c in "_'"):
                    end += 1
                else:
                    break
            lexeme = source[pos:end]
            kind = classify_token(lexeme, sentence_initial)
        elif ch.isascii() and ch.isdigit():
            end = pos + 1
            while end < n and source[end].isascii() and source[end].isdigit():
                end += 1
            lexeme = source[pos:end]
            kind = TokenKind.OTHER
        elif source[pos : pos + 2] in _TWO_CHAR_OPS:
            lexeme = source[pos : pos + 2]
            kind = classify_token(lexeme, sentence_initial)
        elif ch in _SINGLE_PUNCT:
            lexeme = ch
            kind = classify_token(lexeme, sentence_initial)
        else:
            # Anything else (UTF-8 math symbols and the like) passes through
            # as a single-character token.
            lexeme = ch
            kind = TokenKind.OTHER

        pos += len(lexeme)
        line, col = _advance_position(lexeme, line, col)
        items.append((SpacingLabel.from_raw(raw), Token(lexeme, kind, tok_line, tok_col)))

        if kind is TokenKind.COMMENT:
            # Comments are transparent: they do not open or close sentences.
            continue
        if lexeme == "." and (pos >= n or source[pos] in _WHITESPACE):
            ends.append(len(items) - 1)
            sentence_initial = True
        else:
            sentence_initial = False

    if items and (not ends or ends[-1] != len(items) - 1):
        ends.append(len(items) - 1)
    return LexedDocument(tuple(items), tuple(ends), trailing)


def render_exact(doc: LexedDocument) -> str:
    """Reproduce the original source byte for byte.

    Raises MissingRawError if any label was synthesized without raw text.
    """
    parts: list[str] = []
    for label, token in doc.items:
        if label.raw is None:
            raise MissingRawError(
                f"label before token at line {token.line}, column {token.col} has no raw text"
            )
        parts.append(label.raw)
        parts.append(token.text)
    parts.append(doc.trailing)
    return "".join(parts)


def render_canonical(doc: LexedDocument) -> str:
    """Render with whitespace synthesized purely from the quantized labels."""
    parts: list[str] = []
    for label, token in doc.items:
        parts.append("\n" * label.newlines + " " * label.horizontal)
        parts.append(token.text)
    return "".join(parts)
