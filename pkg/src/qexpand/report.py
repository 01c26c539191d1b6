"""Figures for the ``explain`` report."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

TOP_PHRASES = 25


def _save(fig, path: Path) -> Path:
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def path_scores(diag: dict, path: Path) -> Path:
    scores = [p["score_value"] for p in diag["paths"]]
    fig, ax = plt.subplots(figsize=(5, 3.5))
    if scores:
        values = sorted(set(scores))
        counts = [scores.count(v) for v in values]
        best = max(values)
        colors = ["tab:red" if v == best else "tab:gray" for v in values]
        ax.bar([f"{v:.3g}" for v in values], counts, color=colors)
    else:
        ax.text(0.5, 0.5, "no paths", ha="center", va="center", transform=ax.transAxes)
    ax.set_xlabel("path score")
    ax.set_ylabel("paths")
    ax.set_title("Concept path scores (kept in red)")
    return _save(fig, path)


def community_growth(diag: dict, path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(5, 3.5))
    plotted = False
    for i, k in enumerate(diag["communities"]):
        adds = [e for e in k["trace"] if e["action"] == "add"]
        if not adds:
            continue
        ax.plot(range(1, len(adds) + 1), [e["wcc"] for e in adds], marker="o", ms=3, label=f"community {i + 1}")
        plotted = True
    if plotted:
        ax.legend(fontsize=7)
    else:
        ax.text(0.5, 0.5, "no growth steps", ha="center", va="center", transform=ax.transAxes)
    ax.set_xlabel("accepted candidate")
    ax.set_ylabel("community WCC")
    ax.set_title("Community growth")
    return _save(fig, path)


def topological_weights(diag: dict, path: Path) -> Path:
    entries = diag["topological_query"][:TOP_PHRASES]
    fig, ax = plt.subplots(figsize=(6, max(2.5, 0.25 * len(entries) + 1)))
    if entries:
        labels = [e["phrase"] for e in entries][::-1]
        ax.barh(labels, [e["weight"] for e in entries][::-1], color="tab:blue")
        ax.set_xlim(0, 1)
    else:
        ax.text(0.5, 0.5, "empty topological query", ha="center", va="center", transform=ax.transAxes)
    ax.set_xlabel("weight")
    ax.set_title("Topological expansion")
    return _save(fig, path)


def write_figures(diag: dict, out_dir: str | Path) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return [
        path_scores(diag, out / "path_scores.png"),
        community_growth(diag, out / "community_growth.png"),
        topological_weights(diag, out / "topological_weights.png"),
    ]
