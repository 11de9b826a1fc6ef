"""Empirical game analysis for symmetric 3-player strategy games.

The empirical game treats each strategy's measured mean utility against every
unordered pair of opponent strategies as its payoff. From that table we
compute best responses per opponent pair, best-response frequencies, pure
Nash equilibria (profiles where no player can strictly gain by switching),
and a best-response graph whose sinks are exactly the equilibria.

Payoffs are assumed symmetric: a strategy's payoff depends only on the
multiset of opponents, which build_payoff_table enforces by averaging over
every seat, profile assignment, and scenario.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from itertools import combinations_with_replacement

from .tournament import ResultRow

__all__ = [
    "BestResponse",
    "BestResponseGraph",
    "CompletenessError",
    "GraphEdge",
    "PayoffTable",
    "best_response",
    "best_response_frequency",
    "build_best_response_graph",
    "build_payoff_table",
    "emit_best_response_graph",
    "find_pure_nash",
    "load_payoff_csv",
    "opponent_pairs",
    "profile_nodes",
]

Pair = tuple[str, str]
Node = tuple[str, str, str]

PAYOFF_COLUMNS = ["opponent_a", "opponent_b", "strategy", "utility"]


class CompletenessError(ValueError):
    """The payoff table is missing cells the analysis needs."""


def opponent_pairs(strategies: tuple[str, ...]) -> list[Pair]:
    """All unordered opponent pairs (multisets of size 2), C(n+1, 2) of them."""
    return list(combinations_with_replacement(sorted(strategies), 2))


def profile_nodes(strategies: tuple[str, ...]) -> list[Node]:
    """All unordered 3-player strategy profiles, C(n+2, 3) of them."""
    return list(combinations_with_replacement(sorted(strategies), 3))


@dataclass(frozen=True)
class PayoffTable:
    """Mean utility of each strategy against every unordered opponent pair."""

    strategies: tuple[str, ...]
    payoff: dict[tuple[str, Pair], float]

    def __post_init__(self) -> None:
        object.__setattr__(self, "strategies", tuple(sorted(self.strategies)))
        gaps = [
            (s, pair)
            for pair in opponent_pairs(self.strategies)
            for s in self.strategies
            if (s, pair) not in self.payoff
        ]
        if gaps:
            listing = ", ".join(f"{s} vs ({a}, {b})" for s, (a, b) in gaps)
            raise CompletenessError(f"payoff table is missing {len(gaps)} cells: {listing}")
        for value in self.payoff.values():
            if value != value or value in (float("inf"), float("-inf")):
                raise ValueError("payoff table contains a non-finite value")

    def get(self, strategy: str, pair: Pair) -> float:
        return self.payoff[(strategy, tuple(sorted(pair)))]

    def scaled(self, factor: float) -> "PayoffTable":
        if factor <= 0:
            raise ValueError("scale factor must be positive")
        return PayoffTable(self.strategies, {k: v * factor for k, v in self.payoff.items()})


def build_payoff_table(rows: list[ResultRow]) -> PayoffTable:
    """Aggregate per-seat tournament rows into the symmetric payoff table.

    Every seat row contributes to the cell (its strategy, multiset of the
    other two seats' strategies); cells are means over all contributions.
    Raises CompletenessError when some (strategy, pair) combination never
    occurred, listing the gaps.
    """
    sessions: dict[tuple, list[ResultRow]] = {}
    for row in rows:
        key = (row.scenario, row.triplet, row.assignment, row.repetition)
        sessions.setdefault(key, []).append(row)

    sums: dict[tuple[str, Pair], float] = {}
    counts: dict[tuple[str, Pair], int] = {}
    names: set[str] = set()
    for key, group in sessions.items():
        if len(group) != 3:
            raise ValueError(f"session {key} has {len(group)} seat rows, expected 3")
        group = sorted(group, key=lambda r: r.seat)
        for row in group:
            opponents = tuple(sorted(r.strategy for r in group if r.seat != row.seat))
            cell = (row.strategy, opponents)
            sums[cell] = sums.get(cell, 0.0) + row.utility
            counts[cell] = counts.get(cell, 0) + 1
            names.add(row.strategy)

    payoff = {cell: sums[cell] / counts[cell] for cell in sums}
    return PayoffTable(tuple(sorted(names)), payoff)


def load_payoff_csv(fp) -> PayoffTable:
    """Read a payoff table from CSV columns opponent_a, opponent_b, strategy,
    utility. Each cell must appear exactly once."""
    reader = csv.DictReader(fp)
    missing = set(PAYOFF_COLUMNS) - set(reader.fieldnames or [])
    if missing:
        raise ValueError(f"payoff CSV is missing columns: {sorted(missing)}")
    payoff: dict[tuple[str, Pair], float] = {}
    names: set[str] = set()
    for i, record in enumerate(reader, start=2):
        pair = tuple(sorted((record["opponent_a"], record["opponent_b"])))
        cell = (record["strategy"], pair)
        if cell in payoff:
            raise ValueError(
                f"line {i}: duplicate cell {record['strategy']} vs ({pair[0]}, {pair[1]})"
            )
        payoff[cell] = float(record["utility"])
        names.add(record["strategy"])
        names.update(pair)
    return PayoffTable(tuple(sorted(names)), payoff)


@dataclass(frozen=True)
class BestResponse:
    strategy: str
    utility: float
    tied: bool


def best_response(table: PayoffTable, pair: Pair) -> BestResponse:
    """The strategy with the highest payoff against the pair; ties are broken
    by name order and flagged."""
    pair = tuple(sorted(pair))
    scores = [(s, table.get(s, pair)) for s in table.strategies]
    top = max(u for _, u in scores)
    winners = [s for s, u in scores if u == top]
    return BestResponse(winners[0], top, len(winners) > 1)


def best_response_frequency(table: PayoffTable) -> dict[str, int]:
    """How often each strategy is the best response, over all opponent pairs."""
    freq = {s: 0 for s in table.strategies}
    for pair in opponent_pairs(table.strategies):
        freq[best_response(table, pair).strategy] += 1
    return freq


def find_pure_nash(table: PayoffTable) -> list[Node]:
    """Profiles where every member is a weak best response to the other two.

    A player deviates only for a strict gain, so equal-payoff alternatives do
    not break an equilibrium.
    """
    equilibria = []
    for node in profile_nodes(table.strategies):
        stable = True
        for member in set(node):
            rest = _remove_one(node, member)
            if best_response(table, rest).utility > table.get(member, rest):
                stable = False
                break
        if stable:
            equilibria.append(node)
    return equilibria


def _remove_one(node: Node, member: str) -> Pair:
    out = list(node)
    out.remove(member)
    return tuple(out)


@dataclass(frozen=True)
class GraphEdge:
    source: Node
    target: Node
    deviator: str
    replacement: str
    gain: float
    is_best: bool


@dataclass(frozen=True)
class BestResponseGraph:
    nodes: tuple[Node, ...]
    edges: tuple[GraphEdge, ...]
    equilibria: tuple[Node, ...]


def build_best_response_graph(table: PayoffTable, all_improving: bool = False) -> BestResponseGraph:
    """Directed graph over profiles: an edge means one player strictly gains
    by switching to its best response (plus, optionally, to any improvement).

    Sinks (out-degree zero) are exactly the pure Nash equilibria.
    """
    nodes = tuple(profile_nodes(table.strategies))
    edges: list[GraphEdge] = []
    for node in nodes:
        for member in sorted(set(node)):
            rest = _remove_one(node, member)
            current = table.get(member, rest)
            br = best_response(table, rest)
            if br.utility > current:
                target = tuple(sorted((*rest, br.strategy)))
                edges.append(GraphEdge(node, target, member, br.strategy, br.utility - current, True))
                if all_improving:
                    for alt in table.strategies:
                        gain = table.get(alt, rest) - current
                        if gain > 0 and alt != br.strategy:
                            alt_target = tuple(sorted((*rest, alt)))
                            edges.append(GraphEdge(node, alt_target, member, alt, gain, False))
    edges.sort(key=lambda e: (e.source, e.deviator, not e.is_best, e.target))
    sources = {e.source for e in edges}
    equilibria = tuple(n for n in nodes if n not in sources)
    return BestResponseGraph(nodes, tuple(edges), equilibria)


_EDGE_PALETTE = [
    "#1b9e77",
    "#d95f02",
    "#7570b3",
    "#e7298a",
    "#66a61e",
    "#e6ab02",
    "#a6761d",
    "#666666",
]


def node_label(node: Node) -> str:
    return "+".join(node)


def emit_best_response_graph(table: PayoffTable, all_improving: bool = False) -> str:
    """Render the best-response graph as deterministic Graphviz DOT text.

    Nodes are sorted lexicographically and labeled "a+b+c"; equilibrium nodes
    are filled green; edges are colored by the deviating strategy and carry
    the deviation's utility gain.
    """
    graph = build_best_response_graph(table, all_improving)
    color = {s: _EDGE_PALETTE[i % len(_EDGE_PALETTE)] for i, s in enumerate(table.strategies)}
    equilibria = set(graph.equilibria)

    lines = [
        "digraph best_response {",
        "  rankdir=LR;",
        '  node [shape=box, style="rounded"];',
    ]
    for node in graph.nodes:
        label = node_label(node)
        if node in equilibria:
            lines.append(f'  "{label}" [style="rounded,filled", fillcolor="palegreen"];')
        else:
            lines.append(f'  "{label}";')
    for edge in graph.edges:
        attrs = [
            f'color="{color[edge.deviator]}"',
            f'label="{edge.deviator}->{edge.replacement} +{edge.gain:.4f}"',
        ]
        if not edge.is_best:
            attrs.append('style="dashed"')
        lines.append(
            f'  "{node_label(edge.source)}" -> "{node_label(edge.target)}" [{", ".join(attrs)}];'
        )
    lines.append("}")
    return "\n".join(lines) + "\n"
