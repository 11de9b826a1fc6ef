"""Batch tournaments: enumerate agent triplets and profile assignments, run
every pairing as an independent session, and summarize per-agent metrics.

The methodology mirrors the multilateral ANAC setup: sessions seat k agents
(default 3); agent order within a combination does not define a new case, so
combinations are multisets (C(n+k-1, k) of them for n agent types); and for
fairness every one of the k! assignments of the scenario's first k preference
profiles to seats is played. One scenario with 4 agent types therefore yields
20 * 6 = 120 sessions and 360 per-seat result rows.

Sessions are independent work items; the runner can spread them over worker
processes, and rows are sorted into canonical order before use so the worker
count never changes the output.
"""

from __future__ import annotations

import csv
import math
import statistics
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import combinations_with_replacement, permutations

from .agents import make_strategy
from .domain import Scenario
from .protocol import run_session
from .scenario_io import ScenarioWarning
from .seeding import derive_seed

__all__ = [
    "AgentMetrics",
    "ResultRow",
    "TournamentConfig",
    "compute_metrics",
    "enumerate_assignments",
    "enumerate_triplets",
    "read_results_csv",
    "run_tournament",
    "write_results_csv",
]

RESULT_COLUMNS = [
    "scenario",
    "triplet",
    "assignment",
    "repetition",
    "seat",
    "strategy",
    "utility",
    "agreement",
    "rounds_used",
    "seed",
]


@dataclass(frozen=True)
class ResultRow:
    """One seat's result in one session."""

    scenario: str
    triplet: str
    assignment: int
    repetition: int
    seat: int
    strategy: str
    utility: float
    agreement: bool
    rounds_used: int
    seed: int

    def sort_key(self):
        return (self.scenario, self.triplet, self.assignment, self.repetition, self.seat)


@dataclass(frozen=True)
class TournamentConfig:
    strategies: tuple[str, ...]
    scenarios: tuple[Scenario, ...]
    seats_per_session: int = 3
    deadline_rounds: int = 1000
    master_seed: int = 0
    repetitions: int = 1
    workers: int = 1

    def __post_init__(self) -> None:
        object.__setattr__(self, "strategies", tuple(self.strategies))
        object.__setattr__(self, "scenarios", tuple(self.scenarios))
        if not self.strategies:
            raise ValueError("need at least one strategy")
        if self.seats_per_session < 2:
            raise ValueError("seats_per_session must be at least 2")
        if self.repetitions < 1:
            raise ValueError("repetitions must be at least 1")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")


def enumerate_triplets(strategies: list[str] | tuple[str, ...], k: int) -> list[tuple[str, ...]]:
    """All size-k multisets over the strategy names, in sorted canonical order.

    Count is C(n+k-1, k): agent order inside a combination does not matter and
    repeats are allowed (three identical agents is a valid table).
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    return list(combinations_with_replacement(sorted(strategies), k))


def enumerate_assignments(k: int, profiles) -> list[tuple[int, ...]]:
    """All k! bijections seat -> profile index, in lexicographic order."""
    if len(profiles) != k:
        raise ValueError(f"expected exactly {k} profiles, got {len(profiles)}")
    return list(permutations(range(k)))


def _session_rows(
    scenario: Scenario,
    triplet: tuple[str, ...],
    assignment_id: int,
    perm: tuple[int, ...],
    repetition: int,
    deadline_rounds: int,
    seed: int,
) -> list[ResultRow]:
    k = len(triplet)
    seated = Scenario(
        scenario.name, scenario.space, tuple(scenario.profiles[perm[i]] for i in range(k))
    )
    strategies = [make_strategy(name) for name in triplet]
    result, _transcript = run_session(seated, strategies, deadline_rounds, seed)
    label = "+".join(triplet)
    return [
        ResultRow(
            scenario=scenario.name,
            triplet=label,
            assignment=assignment_id,
            repetition=repetition,
            seat=seat,
            strategy=triplet[seat],
            utility=result.utilities[seat],
            agreement=result.agreement is not None,
            rounds_used=result.rounds_used,
            seed=seed,
        )
        for seat in range(k)
    ]


def _run_batch(args) -> list[ResultRow]:
    rows: list[ResultRow] = []
    for task in args:
        rows.extend(_session_rows(*task))
    return rows


def build_tasks(config: TournamentConfig) -> list[tuple]:
    """Expand a config into one task tuple per session.

    Scenarios with fewer profiles than seats are skipped with a warning; ones
    with more contribute their first k profiles, permuted over all
    assignments. Session seeds are derived from the master seed and the full
    task identity, so any single session can be reproduced in isolation.
    """
    k = config.seats_per_session
    triplets = enumerate_triplets(config.strategies, k)
    tasks = []
    for scenario in config.scenarios:
        if len(scenario.profiles) < k:
            warnings.warn(
                f"scenario {scenario.name!r} has {len(scenario.profiles)} profiles, "
                f"needs {k}; skipping",
                ScenarioWarning,
            )
            continue
        seated = scenario.with_seats(k)
        assignments = enumerate_assignments(k, seated.profiles)
        for triplet in triplets:
            for assignment_id, perm in enumerate(assignments):
                for rep in range(config.repetitions):
                    seed = derive_seed(
                        config.master_seed, scenario.name, "+".join(triplet), assignment_id, rep
                    )
                    tasks.append(
                        (seated, triplet, assignment_id, perm, rep, config.deadline_rounds, seed)
                    )
    return tasks


def run_tournament(config: TournamentConfig) -> list[ResultRow]:
    """Run every session of the tournament and return rows in canonical order."""
    tasks = build_tasks(config)
    if config.workers > 1 and len(tasks) > 1:
        chunks = [tasks[i :: config.workers] for i in range(config.workers)]
        chunks = [c for c in chunks if c]
        rows: list[ResultRow] = []
        with ProcessPoolExecutor(max_workers=len(chunks)) as pool:
            for batch in pool.map(_run_batch, chunks):
                rows.extend(batch)
    else:
        rows = _run_batch(tasks)
    rows.sort(key=ResultRow.sort_key)
    return rows


@dataclass(frozen=True)
class AgentMetrics:
    """Summary statistics for one strategy across its seat rows."""

    mean_utility: float
    standard_error: float
    utility_on_agreement: float | None
    agreement_rate: float
    rows: int


def compute_metrics(rows: list[ResultRow]) -> dict[str, AgentMetrics]:
    """Per-strategy mean utility, standard error of the mean (sample standard
    deviation over sqrt(n)), mean utility restricted to agreements, and
    agreement rate. A strategy seated multiple times in one session
    contributes one row per seat."""
    by_strategy: dict[str, list[ResultRow]] = {}
    for row in rows:
        by_strategy.setdefault(row.strategy, []).append(row)

    metrics: dict[str, AgentMetrics] = {}
    for name in sorted(by_strategy):
        group = by_strategy[name]
        utilities = [r.utility for r in group]
        n = len(utilities)
        mean = statistics.fmean(utilities)
        stderr = statistics.stdev(utilities) / math.sqrt(n) if n > 1 else 0.0
        agreed = [r.utility for r in group if r.agreement]
        metrics[name] = AgentMetrics(
            mean_utility=mean,
            standard_error=stderr,
            utility_on_agreement=statistics.fmean(agreed) if agreed else None,
            agreement_rate=len(agreed) / n,
            rows=n,
        )
    return metrics


def write_results_csv(rows: list[ResultRow], fp) -> None:
    """Write rows in the documented column order; utilities carry 6 decimals."""
    writer = csv.writer(fp, lineterminator="\n")
    writer.writerow(RESULT_COLUMNS)
    for row in rows:
        writer.writerow(
            [
                row.scenario,
                row.triplet,
                row.assignment,
                row.repetition,
                row.seat,
                row.strategy,
                f"{row.utility:.6f}",
                int(row.agreement),
                row.rounds_used,
                row.seed,
            ]
        )


def read_results_csv(fp) -> list[ResultRow]:
    """Inverse of write_results_csv."""
    reader = csv.DictReader(fp)
    missing = set(RESULT_COLUMNS) - set(reader.fieldnames or [])
    if missing:
        raise ValueError(f"results CSV is missing columns: {sorted(missing)}")
    rows = []
    for record in reader:
        rows.append(
            ResultRow(
                scenario=record["scenario"],
                triplet=record["triplet"],
                assignment=int(record["assignment"]),
                repetition=int(record["repetition"]),
                seat=int(record["seat"]),
                strategy=record["strategy"],
                utility=float(record["utility"]),
                agreement=record["agreement"] == "1",
                rounds_used=int(record["rounds_used"]),
                seed=int(record["seed"]),
            )
        )
    return rows
