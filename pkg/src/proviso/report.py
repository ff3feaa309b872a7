"""Figure rendering for benchmark reports.

Figures are written next to the CSV they describe, sharing its stem.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .lab import ALL_STRATEGIES, DiffReport  # noqa: E402

_COLORS = {
    "EXCEPTION_FIRST": "#1f77b4",
    "CONDITIONS_FIRST": "#d62728",
    "RACING": "#7f7f7f",
}


def _label(strategy) -> str:
    return strategy.value.replace("_", " ").lower()


def render_bench_figures(report: DiffReport, csv_path: Path | str) -> list[Path]:
    """Render the cost figures for one benchmark run.

    Produces a per-strategy histogram of propositions evaluated, a
    trial-by-trial scatter of the two sequential strategies, and a bar
    chart of mean counter values. Returns the written paths.
    """
    csv_path = Path(csv_path)
    stem = csv_path.with_suffix("")
    written: list[Path] = []

    props = {s: [row.counts[s].propositions_evaluated for row in report.rows]
             for s in ALL_STRATEGIES}

    fig, ax = plt.subplots(figsize=(7, 4.5))
    upper = max(max(v) for v in props.values())
    bins = range(0, upper + 2)
    for s in ALL_STRATEGIES:
        ax.hist(props[s], bins=bins, histtype="step", lw=1.6,
                color=_COLORS[s.value], label=_label(s))
    ax.set_xlabel("propositions evaluated per trial")
    ax.set_ylabel("trials")
    ax.set_title(f"evaluation cost across {report.trials} trials")
    ax.legend(frameon=False)
    path = Path(f"{stem}_cost_hist.png")
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    written.append(path)

    ef, cf = ALL_STRATEGIES[0], ALL_STRATEGIES[1]
    fig, ax = plt.subplots(figsize=(5, 5))
    lim = upper + 1
    ax.plot([0, lim], [0, lim], ls="--", c="0.6", lw=1, label="equal cost")
    ax.scatter(props[ef], props[cf], s=14, alpha=0.5, c=_COLORS[ef.value])
    ax.set_xlabel(f"{_label(ef)}: propositions evaluated")
    ax.set_ylabel(f"{_label(cf)}: propositions evaluated")
    ax.set_title("per-trial cost, sequential strategies")
    ax.legend(frameon=False)
    path = Path(f"{stem}_cost_scatter.png")
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    written.append(path)

    counters = ("propositions_evaluated", "rule_expansions", "fact_lookups")
    fig, ax = plt.subplots(figsize=(7, 4))
    width = 0.8 / len(ALL_STRATEGIES)
    for i, s in enumerate(ALL_STRATEGIES):
        means = [sum(getattr(row.counts[s], c) for row in report.rows) / report.trials
                 for c in counters]
        xs = [j + i * width for j in range(len(counters))]
        ax.bar(xs, means, width=width, color=_COLORS[s.value], label=_label(s))
    ax.set_xticks([j + width for j in range(len(counters))])
    ax.set_xticklabels([c.replace("_", " ") for c in counters])
    ax.set_ylabel("mean per trial")
    ax.set_title("mean evaluation cost by strategy")
    ax.legend(frameon=False)
    path = Path(f"{stem}_cost_means.png")
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    written.append(path)

    return written
