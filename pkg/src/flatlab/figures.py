"""Figure rendering for report tables: each table becomes a PNG line plot
next to the delimited output.  Import is deferred so the report path stays
matplotlib-free unless figures are requested."""

from __future__ import annotations

import os
from typing import List

__all__ = ["render_table", "render_report_figures"]


def render_table(table, directory: str) -> str:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    os.makedirs(directory, exist_ok=True)
    xs = [row[0] for row in table.rows]
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for j, label in enumerate(table.columns[1:], start=1):
        ax.plot(xs, [row[j] for row in table.rows], label=label, lw=1.2)
    ax.set_xlabel(table.columns[0])
    ax.set_title(table.name)
    if all(x > 0 for x in xs) and max(xs) / max(min(xs), 1e-300) > 50:
        ax.set_xscale("log")
    ys = [row[j] for row in table.rows for j in range(1, len(table.columns))]
    positives = [y for y in ys if y > 0]
    if positives and len(positives) == len(ys) and max(ys) / max(min(positives), 1e-300) > 1e3:
        ax.set_yscale("log")
    ax.legend(loc="best", fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    path = os.path.join(directory, f"{table.name}.png")
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def render_report_figures(report, directory: str) -> List[str]:
    return [render_table(t, directory) for t in report.tables]
