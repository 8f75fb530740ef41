"""Figure rendering for selection reports.

Figures are written straight to files; no interactive backend is required.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .pipeline import SelectionReport


def plot_accuracy_curves(report: SelectionReport, path) -> None:
    """Cross-validated accuracy against subset size, one line per alpha.

    The best prefix of each curve is marked; the global winner is annotated.
    """
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    for result in report.alpha_results:
        sizes = range(1, len(result.accuracy_curve) + 1)
        line, = ax.plot(sizes, result.accuracy_curve, marker=".",
                        label=f"alpha={result.ranking.alpha:g}")
        ax.plot(result.best_size, result.best_score, marker="o",
                color=line.get_color(), markersize=9, fillstyle="none")
    winner = next(r for r in report.alpha_results
                  if r.ranking.alpha == report.global_best_alpha)
    ax.annotate(
        f"best: {len(report.global_best_subset)} features, "
        f"J={report.global_best_score:.4f}",
        xy=(winner.best_size, winner.best_score),
        xytext=(0.98, 0.05), textcoords="axes fraction",
        ha="right", fontsize=9,
        arrowprops={"arrowstyle": "->", "lw": 0.8},
    )
    ax.set_xlabel("subset size")
    ax.set_ylabel("cross-validated accuracy")
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_criterion_curves(report: SelectionReport, path) -> None:
    """Relevance and redundancy of each alpha's prefixes, side by side."""
    fig, (ax_rel, ax_red) = plt.subplots(1, 2, figsize=(9.5, 4.0), sharex=True)
    for result in report.alpha_results:
        sizes = range(1, len(result.accuracy_curve) + 1)
        label = f"alpha={result.ranking.alpha:g}"
        ax_rel.plot(sizes, result.ranking.relevance_curve, label=label)
        ax_red.plot(sizes, result.ranking.redundancy_curve, label=label)
    ax_rel.set_xlabel("subset size")
    ax_red.set_xlabel("subset size")
    ax_rel.set_ylabel("mean MI with class (bits)")
    ax_red.set_ylabel("mean pairwise MI (bits)")
    for ax in (ax_rel, ax_red):
        ax.grid(True, alpha=0.3)
    ax_rel.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
