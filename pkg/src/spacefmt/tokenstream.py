"""Line-oriented serialization of lexed documents.

Format (UTF-8, one record per line):

    spacefmt-tokens v1
    L <newlines> <horizontal> <raw-escaped>
    T <kind-char> <line> <col> <lexeme-escaped>
    S <index>

L and T records alternate in stream order. A final L record with no
following T carries trailing whitespace. The raw field of an L record is
"-" when the label was synthesized without raw text and is omitted entirely
when the raw text is empty. S records list sentence-end item indices.

Escaped fields use backslash escapes for newline, tab, space, and backslash
(plus carriage return, form feed, and vertical tab so any whitespace
round-trips).
"""

from __future__ import annotations

from .errors import FormatError
from .lexer import (
    _KIND_BY_CHAR,
    MAX_HORIZONTAL,
    MAX_NEWLINES,
    LexedDocument,
    SpacingLabel,
    Token,
    quantize_raw,
)

HEADER = "spacefmt-tokens v1"

_ESCAPES = {
    "\\": "\\\\",
    "\n": "\\n",
    "\t": "\\t",
    " ": "\\s",
    "\r": "\\r",
    "\f": "\\f",
    "\v": "\\v",
}
_UNESCAPES = {
    "\\": "\\",
    "n": "\n",
    "t": "\t",
    "s": " ",
    "r": "\r",
    "f": "\f",
    "v": "\v",
}


def escape_field(text: str) -> str:
    return "".join(_ESCAPES.get(ch, ch) for ch in text)


def unescape_field(field: str, lineno: int) -> str:
    out: list[str] = []
    i = 0
    n = len(field)
    while i < n:
        ch = field[i]
        if ch == "\\":
            if i + 1 >= n:
                raise FormatError("dangling backslash in escaped field", lineno)
            code = field[i + 1]
            if code not in _UNESCAPES:
                raise FormatError(f"unknown escape '\\{code}'", lineno)
            out.append(_UNESCAPES[code])
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def _label_record(label: SpacingLabel) -> str:
    head = f"L {label.newlines} {label.horizontal}"
    if label.raw is None:
        return head + " -"
    if label.raw == "":
        return head
    return head + " " + escape_field(label.raw)


def export_token_stream(doc: LexedDocument) -> str:
    """Serialize a document; import_token_stream inverts this exactly."""
    lines = [HEADER]
    for label, token in doc.items:
        lines.append(_label_record(label))
        lines.append(
            f"T {token.kind.value} {token.line} {token.col} {escape_field(token.text)}"
        )
    if doc.trailing:
        lines.append(_label_record(SpacingLabel.from_raw(doc.trailing)))
    for idx in doc.sentence_ends:
        lines.append(f"S {idx}")
    return "\n".join(lines) + "\n"


def _parse_int(text: str, what: str, lineno: int) -> int:
    try:
        return int(text, 10)
    except ValueError:
        raise FormatError(f"bad {what} {text!r}", lineno) from None


def import_token_stream(text: str) -> LexedDocument:
    """Parse the serialized form back into a document.

    Raises FormatError naming the offending line on any malformed input.
    """
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or lines[0] != HEADER:
        raise FormatError(f"expected header {HEADER!r}", 1)

    items: list[tuple[SpacingLabel, Token]] = []
    ends: list[int] = []
    pending: SpacingLabel | None = None
    pending_line = 0

    for lineno, line in enumerate(lines[1:], start=2):
        if line.startswith("L "):
            if pending is not None:
                raise FormatError("spacing record without a following token", pending_line)
            parts = line.split(" ")
            if len(parts) not in (3, 4):
                raise FormatError("spacing record needs 3 or 4 fields", lineno)
            newlines = _parse_int(parts[1], "newline count", lineno)
            horizontal = _parse_int(parts[2], "horizontal count", lineno)
            if not (0 <= newlines <= MAX_NEWLINES and 0 <= horizontal <= MAX_HORIZONTAL):
                raise FormatError("spacing counts out of range", lineno)
            if len(parts) == 3:
                raw: str | None = ""
            elif parts[3] == "-":
                raw = None
            else:
                raw = unescape_field(parts[3], lineno)
            if raw is not None:
                if any(ch not in " \t\n\r\f\v" for ch in raw):
                    raise FormatError("raw spacing contains non-whitespace", lineno)
                if quantize_raw(raw) != (newlines, horizontal):
                    raise FormatError("raw spacing disagrees with quantized counts", lineno)
            pending = SpacingLabel(newlines, horizontal, raw)
            pending_line = lineno
        elif line.startswith("T "):
            if pending is None:
                raise FormatError("token record without a preceding spacing record", lineno)
            parts = line.split(" ")
            if len(parts) != 5:
                raise FormatError("token record needs 5 fields", lineno)
            kind = _KIND_BY_CHAR.get(parts[1])
            if kind is None:
                raise FormatError(f"unknown token kind {parts[1]!r}", lineno)
            tline = _parse_int(parts[2], "line number", lineno)
            tcol = _parse_int(parts[3], "column number", lineno)
            if tline < 1 or tcol < 0:
                raise FormatError("token position out of range", lineno)
            lexeme = unescape_field(parts[4], lineno)
            if not lexeme:
                raise FormatError("empty token lexeme", lineno)
            items.append((pending, Token(lexeme, kind, tline, tcol)))
            pending = None
        elif line.startswith("S "):
            parts = line.split(" ")
            if len(parts) != 2:
                raise FormatError("sentence record needs 2 fields", lineno)
            ends.append(_parse_int(parts[1], "sentence index", lineno))
        else:
            raise FormatError(f"unknown record {line[:20]!r}", lineno)

    trailing = ""
    if pending is not None:
        # A dangling spacing record carries the trailing whitespace.
        if pending.raw is None:
            raise FormatError("trailing spacing record has no raw text", pending_line)
        trailing = pending.raw

    last = len(lines)
    for i, idx in enumerate(ends):
        if idx < 0 or idx >= len(items):
            raise FormatError(f"sentence index {idx} out of range", last)
        if i and idx <= ends[i - 1]:
            raise FormatError("sentence indices must be strictly increasing", last)
        if items[idx][1].text != "." and idx != len(items) - 1:
            raise FormatError(f"sentence index {idx} does not point at a sentence end", last)
    if items:
        if not ends or ends[-1] != len(items) - 1:
            raise FormatError("final token must close the last sentence", last)
    elif ends:
        raise FormatError("sentence records in an empty document", last)

    return LexedDocument(tuple(items), tuple(ends), trailing)
