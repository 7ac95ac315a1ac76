"""Exception types shared across the package."""

from __future__ import annotations


class SpacefmtError(Exception):
    """Base class for every error this package raises on purpose."""


class LexError(SpacefmtError):
    """Source text cannot be tokenized (unterminated comment or string)."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{message} at line {line}, column {col}")
        self.line = line
        self.col = col


class MissingRawError(SpacefmtError):
    """Byte-exact rendering was asked of a label that has no raw text."""


class FormatError(SpacefmtError):
    """A serialized file (token stream, split, vocabulary) is malformed."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class CorpusIoError(SpacefmtError):
    """A corpus path does not exist or cannot be read."""


class EmptyCorpusError(SpacefmtError):
    """No document survived corpus construction."""


class DegenerateSplitError(SpacefmtError):
    """A split part with a positive ratio received zero documents."""


class ParityError(SpacefmtError):
    """A prediction was requested at a token position instead of a spacing slot."""


class VocabMismatchError(SpacefmtError):
    """Predictor and documents were built against different vocabularies."""


class ModelIoError(SpacefmtError):
    """A model file is truncated, corrupt, or not a model file at all."""


class DivergenceError(SpacefmtError):
    """Training produced a non-finite loss."""
