"""Deterministic generator of Coq-like files with one fixed whitespace style.

The style rules are rigid so that the spacing label at every slot is a
function of a short left context, which makes the corpus a learnability
benchmark rather than a statistical one:

- no space on either side of "=>",
- a single space between identifiers,
- no space before ".",
- exactly one blank line between sentences,
- proof-body sentences indented by two spaces after "Proof".

Documents are derived purely from ``(seed, index)``, so any slice of the
corpus can be regenerated independently.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

_VARS = ("x", "y", "z", "u", "v", "w", "s", "t")
_HYPS = tuple(f"H{i}" for i in range(1, 9))
_NAMES = tuple(f"fact{i}" for i in range(24))

_INDENT = "  "


def _pick(rng: np.random.Generator, pool: tuple[str, ...]) -> str:
    return pool[int(rng.integers(0, len(pool)))]


def _tactic(rng: np.random.Generator) -> str:
    choice = int(rng.integers(0, 4))
    if choice == 0:
        return f"move=>{_pick(rng, _VARS)} {_pick(rng, _VARS)}."
    if choice == 1:
        return f"rewrite {_pick(rng, _HYPS)} {_pick(rng, _HYPS)}."
    if choice == 2:
        return f"case: {_pick(rng, _VARS)}."
    return f"apply {_pick(rng, _HYPS)}."


def generate_document(seed: int, index: int) -> str:
    """One synthetic file; deterministic in (seed, index)."""
    rng = np.random.default_rng((seed, index))
    sentences: list[tuple[str, bool]] = []  # (text, indented)
    for _ in range(int(rng.integers(4, 8))):
        name = _pick(rng, _NAMES)
        v1 = _pick(rng, _VARS)
        v2 = _pick(rng, _VARS)
        sentences.append(
            (f"Lemma {name} : forall {v1} {v2}, {v1} = {v2} -> {v1} = 0.", False)
        )
        sentences.append(("Proof.", False))
        for _ in range(int(rng.integers(2, 6))):
            sentences.append((_tactic(rng), True))
        sentences.append((f"exact {_pick(rng, _NAMES)}.", True))
        sentences.append(("Qed.", False))

    parts = [sentences[0][0]]
    for text, indented in sentences[1:]:
        parts.append("\n\n" + (_INDENT if indented else "") + text)
    return "".join(parts) + "\n"


def write_corpus(directory: str | Path, n_files: int = 200, seed: int = 0) -> list[Path]:
    """Write the corpus under ``directory`` and return the file paths."""
    root = Path(directory)
    root.mkdir(parents=True, exist_ok=True)
    paths = []
    for index in range(n_files):
        path = root / f"synth_{index:03d}.v"
        path.write_text(generate_document(seed, index), encoding="utf-8")
        paths.append(path)
    return paths
