"""Report formatting: aligned text tables, metrics CSV, and figure rendering.

Mean utility, standard error, and utility on agreement are reported scaled by
100 with two decimals (so 0.8140 prints as 81.40) to keep the tables legible;
agreement rate prints as a percentage. Figures are rendered headless with
matplotlib; imports happen lazily so plain text workflows stay fast.
"""

from __future__ import annotations

import csv

from .egt import BestResponseGraph, PayoffTable, best_response, best_response_frequency, node_label, opponent_pairs
from .tournament import AgentMetrics

__all__ = [
    "format_best_responses",
    "format_metrics_table",
    "format_payoff_table",
    "render_best_response_graph",
    "render_metrics_chart",
    "write_metrics_csv",
]

METRICS_COLUMNS = [
    "strategy",
    "mean_x100",
    "stderr_x100",
    "util_on_agreement_x100",
    "agreement_rate_pct",
]


def _by_mean(metrics: dict[str, AgentMetrics]) -> list[tuple[str, AgentMetrics]]:
    return sorted(metrics.items(), key=lambda kv: (-kv[1].mean_utility, kv[0]))


def format_metrics_table(metrics: dict[str, AgentMetrics]) -> str:
    """Aligned per-agent summary, best mean utility first."""
    rows = [("agent", "mean utility", "on agreement", "agreement rate", "rows")]
    for name, m in _by_mean(metrics):
        on_agreement = f"{m.utility_on_agreement * 100:.2f}" if m.utility_on_agreement is not None else "-"
        rows.append(
            (
                name,
                f"{m.mean_utility * 100:.2f} ± {m.standard_error * 100:.2f}",
                on_agreement,
                f"{m.agreement_rate * 100:.2f}%",
                str(m.rows),
            )
        )
    widths = [max(len(r[c]) for r in rows) for c in range(len(rows[0]))]
    lines = []
    for i, row in enumerate(rows):
        lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
        if i == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def write_metrics_csv(metrics: dict[str, AgentMetrics], fp) -> None:
    writer = csv.writer(fp, lineterminator="\n")
    writer.writerow(METRICS_COLUMNS)
    for name, m in _by_mean(metrics):
        on_agreement = f"{m.utility_on_agreement * 100:.2f}" if m.utility_on_agreement is not None else ""
        writer.writerow(
            [
                name,
                f"{m.mean_utility * 100:.2f}",
                f"{m.standard_error * 100:.2f}",
                on_agreement,
                f"{m.agreement_rate * 100:.2f}",
            ]
        )


def format_payoff_table(table: PayoffTable) -> str:
    """Payoff per opponent pair, strategies listed best first within a pair."""
    lines = []
    for pair in opponent_pairs(table.strategies):
        header = f"({pair[0]}, {pair[1]})"
        ranked = sorted(table.strategies, key=lambda s: (-table.get(s, pair), s))
        for i, s in enumerate(ranked):
            prefix = header if i == 0 else ""
            lines.append(f"{prefix:<40}  {s:<20}  {table.get(s, pair):.4f}")
        lines.append("")
    return "\n".join(lines).rstrip() + "\n"


def format_best_responses(table: PayoffTable) -> str:
    """Best response and its payoff for every opponent pair, plus frequency."""
    lines = ["best responses:"]
    for pair in opponent_pairs(table.strategies):
        br = best_response(table, pair)
        tie = "  (tie)" if br.tied else ""
        lines.append(f"  ({pair[0]}, {pair[1]}) -> {br.strategy}  {br.utility:.4f}{tie}")
    lines.append("")
    lines.append("best response frequency:")
    freq = best_response_frequency(table)
    for name in sorted(freq, key=lambda s: (-freq[s], s)):
        lines.append(f"  {name}: {freq[name]}")
    return "\n".join(lines) + "\n"


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def render_metrics_chart(metrics: dict[str, AgentMetrics], path) -> None:
    """Bar chart of mean utility (x100) with standard-error bars."""
    plt = _pyplot()
    ordered = _by_mean(metrics)
    names = [name for name, _ in ordered]
    means = [m.mean_utility * 100 for _, m in ordered]
    errs = [m.standard_error * 100 for _, m in ordered]

    fig, ax = plt.subplots(figsize=(max(4.0, 1.2 * len(names) + 1.5), 3.6))
    ax.bar(names, means, yerr=errs, capsize=4, color="#4878a8")
    ax.set_ylabel("mean utility (x100)")
    ax.set_ylim(0, 105)
    ax.tick_params(axis="x", rotation=20)
    for label in ax.get_xticklabels():
        label.set_horizontalalignment("right")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_best_response_graph(graph: BestResponseGraph, path) -> None:
    """Draw the best-response graph: circular layout, equilibria in green,
    edges colored by the deviating strategy."""
    plt = _pyplot()
    import networkx as nx

    strategies = sorted({s for node in graph.nodes for s in node})
    palette = ["#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02"]
    color = {s: palette[i % len(palette)] for i, s in enumerate(strategies)}

    g = nx.DiGraph()
    g.add_nodes_from(node_label(n) for n in graph.nodes)
    for edge in graph.edges:
        g.add_edge(node_label(edge.source), node_label(edge.target), color=color[edge.deviator])

    pos = nx.circular_layout(sorted(g.nodes))
    equilibria = {node_label(n) for n in graph.equilibria}
    node_colors = ["#8fdf9f" if n in equilibria else "#d9e4ef" for n in g.nodes]

    fig, ax = plt.subplots(figsize=(9, 9))
    nx.draw_networkx_nodes(g, pos, node_color=node_colors, node_size=1800, ax=ax)
    nx.draw_networkx_labels(g, pos, font_size=7, ax=ax)
    edge_colors = [g.edges[e]["color"] for e in g.edges]
    nx.draw_networkx_edges(
        g, pos, edge_color=edge_colors, arrows=True, arrowsize=14, connectionstyle="arc3,rad=0.08", ax=ax
    )
    handles = [plt.Line2D([0], [0], color=color[s], lw=2, label=s) for s in strategies]
    ax.legend(handles=handles, title="deviating strategy", loc="upper right", fontsize=8)
    ax.set_axis_off()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
