"""Shared test helpers.

Provides a seeded random-source generator used by round-trip and property
tests, plus a recorder that prints one PASS/FAIL line per acceptance
criterion at the end of the pytest run.
"""

from __future__ import annotations

import numpy as np
import pytest

# ---------------------------------------------------------------------------
# Random lexable source soup.
#
# Pieces are chosen so that any concatenation (including with empty
# whitespace between, which merges adjacent pieces into one lexeme) still
# lexes without error: comments are balanced, strings are closed, and no
# piece can open an unterminated construct by touching its neighbor.

WHITESPACE_RUNS = (
    "",
    " ",
    "  ",
    "   ",
    "\t",
    "\t\t ",
    "\n",
    "\n\n",
    "\n\n\n",
    "\n\n\n\n\n",
    "\n  ",
    "\n    ",
    " \t ",
    "\r\n",
    "\r\n  ",
    "\f",
    "\v",
    " " * 41,
    "\n" * 4 + " " * 44,
)

TOKEN_PIECES = (
    "move",
    "=>",
    "x",
    "y'",
    "H",
    "H1",
    "_tmp",
    "Lemma",
    "Proof",
    "Qed",
    "Definition",
    "forall",
    "fun",
    "match",
    "end",
    ".",
    ",",
    ":",
    ";",
    ":=",
    "->",
    "<-",
    "//=",
    "(",
    ")",
    "[",
    "]",
    "{",
    "}",
    "|",
    "0",
    "42",
    "1907",
    "apply",
    "rewrite",
    "∀",
    "→",
    "⊢",
    '"lit"',
    '"a""b"',
    '"sp ace"',
    "(* note *)",
    "(* outer (* inner *) rest *)",
    "(* multi\n   line *)",
)


def random_source(rng: np.random.Generator) -> str:
    """Build one random document that is lexable by construction."""
    parts: list[str] = []
    n_tokens = int(rng.integers(0, 60))
    for _ in range(n_tokens):
        parts.append(WHITESPACE_RUNS[int(rng.integers(len(WHITESPACE_RUNS)))])
        parts.append(TOKEN_PIECES[int(rng.integers(len(TOKEN_PIECES)))])
    parts.append(WHITESPACE_RUNS[int(rng.integers(len(WHITESPACE_RUNS)))])
    return "".join(parts)


@pytest.fixture
def soup():
    """The random-source generator, as a fixture for test modules."""
    return random_source


# ---------------------------------------------------------------------------
# Acceptance-criterion summary: tests register an outcome per criterion and
# the terminal summary prints one PASS/FAIL line for each.

_ACCEPTANCE: dict[int, tuple[str, bool, str]] = {}


def record_criterion(number: int, description: str, passed: bool, detail: str = "") -> None:
    _ACCEPTANCE[number] = (description, bool(passed), detail)


def check_criterion(number: int, description: str, passed: bool, detail: str = "") -> None:
    """Record the outcome, then assert it so pytest fails loudly too."""
    record_criterion(number, description, passed, detail)
    assert passed, f"criterion {number} ({description}): {detail}"


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        description, passed, detail = _ACCEPTANCE[number]
        status = "PASS" if passed else "FAIL"
        line = f"[{status}] criterion {number}: {description}"
        if detail:
            line += f" -- {detail}"
        terminalreporter.write_line(line)
