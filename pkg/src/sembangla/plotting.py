"""Figures for evaluation reports, rendered off-screen to PNG files."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .evaluation import EvalReport  # noqa: E402

STYLE = {
    "font.size": 8,
    "axes.titlesize": 9,
    "axes.labelsize": 8,
    "axes.linewidth": 0.6,
    "xtick.labelsize": 7,
    "ytick.labelsize": 7,
    "figure.dpi": 100,
    "savefig.dpi": 150,
}

# keep output files byte-stable between runs
_PNG_META = {"Software": None}


def plot_confusion(report: EvalReport, path: str | Path, title: str = "Confusion matrix") -> Path:
    """Heatmap of the confusion counts, rows actual and columns predicted."""
    cm = report.confusion
    counts = cm.counts
    n = len(cm.categories)
    size = max(3.0, 0.55 * n + 1.6)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(size, size * 0.9))
        im = ax.imshow(counts, cmap="Blues", vmin=0)
        ax.set_xticks(np.arange(n), labels=cm.categories, rotation=45, ha="right")
        ax.set_yticks(np.arange(n), labels=cm.categories)
        ax.set_xlabel("predicted")
        ax.set_ylabel("actual")
        ax.set_title(title)
        hi = counts.max(initial=0)
        for i in range(n):
            for j in range(n):
                ax.text(j, i, str(int(counts[i, j])), ha="center", va="center",
                        color="white" if hi and counts[i, j] > hi / 2 else "black")
        fig.colorbar(im, ax=ax, fraction=0.046, pad=0.04)
        fig.tight_layout()
        path = Path(path)
        fig.savefig(path, metadata=_PNG_META)
        plt.close(fig)
    return path


def plot_fold_accuracy(report: EvalReport, path: str | Path,
                       title: str = "Accuracy per fold") -> Path:
    """Bar chart of per-fold accuracy with the mean as a horizontal line."""
    accs = [f.accuracy for f in report.folds] or [report.accuracy]
    x = np.arange(1, len(accs) + 1)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(max(3.0, 0.35 * len(accs) + 1.5), 2.4))
        ax.bar(x, accs, color="skyblue", edgecolor="tab:blue", linewidth=0.5)
        ax.axhline(report.accuracy, color="tab:red", linewidth=0.8,
                   label=f"mean {report.accuracy:.3f}")
        ax.set_xticks(x)
        ax.set_xlabel("fold")
        ax.set_ylabel("accuracy")
        ax.set_ylim(0, 1.05)
        ax.set_title(title)
        ax.legend(loc="lower right", frameon=False)
        fig.tight_layout()
        path = Path(path)
        fig.savefig(path, metadata=_PNG_META)
        plt.close(fig)
    return path
