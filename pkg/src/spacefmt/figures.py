"""Accuracy figures rendered next to the text reports.

Two PNG files summarize an evaluation run: a grouped bar chart of top-1
accuracy per slot category, and a line chart of accuracy as the number of
accepted ranks k grows.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .evaluation import EvalReport

_TOPK_SERIES = ((1, "all"), (2, "top-2"), (3, "top-3"), (5, "top-5"))


def _category_keys(reports: list[EvalReport]) -> list[str]:
    topk = {key for _, key in _TOPK_SERIES if key != "all"}
    keys: list[str] = []
    for report in reports:
        for key, tally in report.tallies.items():
            if key not in topk and key not in keys and tally.total:
                keys.append(key)
    return keys


def save_category_figure(reports: list[EvalReport], path: str | Path) -> Path:
    """Grouped bars: top-1 accuracy per category, one group color per model."""
    keys = _category_keys(reports)
    fig, ax = plt.subplots(figsize=(max(6.0, 0.7 * len(keys) + 2.0), 4.0))
    positions = range(len(keys))
    group = max(len(reports), 1)
    bar_width = 0.8 / group
    for row, report in enumerate(reports):
        offsets = [p + (row - (group - 1) / 2.0) * bar_width for p in positions]
        values = [
            (report.accuracy(key) or 0.0) if report.tallies.get(key) else 0.0
            for key in keys
        ]
        ax.bar(offsets, values, width=bar_width, label=report.predictor)
    ax.set_xticks(list(positions))
    ax.set_xticklabels(keys, rotation=45, ha="right")
    ax.set_ylim(0.0, 1.05)
    ax.set_ylabel("top-1 accuracy")
    ax.set_title("Accuracy by slot category")
    ax.legend()
    fig.tight_layout()
    out = Path(path)
    fig.savefig(out)
    plt.close(fig)
    return out


def save_topk_figure(
    reports: list[EvalReport], path: str | Path, ks: tuple[int, ...] = (1, 2, 3, 5)
) -> Path:
    """Accuracy as a function of the number of accepted ranks."""
    series = [(k, key) for k, key in _TOPK_SERIES if k in ks]
    fig, ax = plt.subplots(figsize=(5.0, 4.0))
    for report in reports:
        points = [
            (k, report.accuracy(key))
            for k, key in series
            if report.accuracy(key) is not None
        ]
        if points:
            ax.plot(*zip(*points), marker="o", label=report.predictor)
    ax.set_xticks([k for k, _ in series])
    ax.set_xlabel("k (accepted ranks)")
    ax.set_ylabel("top-k accuracy")
    ax.set_ylim(0.0, 1.05)
    ax.set_title("Top-k accuracy")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    out = Path(path)
    fig.savefig(out)
    plt.close(fig)
    return out


def save_report_figures(
    reports: list[EvalReport],
    out_dir: str | Path,
    ks: tuple[int, ...] = (1, 2, 3, 5),
) -> list[Path]:
    """Render both figures into ``out_dir`` and return their paths."""
    directory = Path(out_dir)
    directory.mkdir(parents=True, exist_ok=True)
    return [
        save_category_figure(reports, directory / "accuracy_categories.png"),
        save_topk_figure(reports, directory / "topk_accuracy.png", ks=ks),
    ]
