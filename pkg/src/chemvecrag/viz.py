"""Matplotlib rendering for similarity panels.

The metrics layer emits CSV; this renders the same panel as a heatmap
figure for the CLI report path.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402

from .metrics import SimilarityPanel  # noqa: E402


def render_heatmap(panel: SimilarityPanel, path: str | Path, title: str | None = None) -> None:
    """Render the six-metric panel as an annotated heatmap PNG."""
    rows = [row for row in panel.rows if not row.failed]
    if not rows:
        raise ValueError("panel has no successful rows to render")
    data = np.array([row.values() for row in rows])

    fig, ax = plt.subplots(
        figsize=(1.6 * data.shape[1], 0.7 * data.shape[0] + 1.6)
    )
    image = ax.imshow(data, cmap="viridis", vmin=0.0, vmax=1.0, aspect="auto")
    ax.set_xticks(range(len(SimilarityPanel.METRIC_NAMES)))
    ax.set_xticklabels(SimilarityPanel.METRIC_NAMES, rotation=30, ha="right")
    ax.set_yticks(range(len(rows)))
    ax.set_yticklabels([f"{row.rank}: {row.hit_id}" for row in rows])
    for i in range(data.shape[0]):
        for j in range(data.shape[1]):
            value = data[i, j]
            ax.text(
                j, i, f"{value:.2f}",
                ha="center", va="center",
                color="white" if value < 0.6 else "black",
                fontsize=8,
            )
    ax.set_title(title or f"similarity panel: {panel.query_id}")
    fig.colorbar(image, ax=ax, shrink=0.85)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
