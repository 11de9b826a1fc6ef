"""Tournament combinatorics, execution, and metric aggregation."""

from __future__ import annotations

import io
import math
import statistics

import pytest

from negsim import (
    AgentMetrics,
    GeneratorConfig,
    ResultRow,
    TournamentConfig,
    compute_metrics,
    enumerate_assignments,
    enumerate_triplets,
    generate_scenario,
    read_results_csv,
    run_tournament,
    write_results_csv,
)
from negsim.report import format_metrics_table
from negsim.scenario_io import ScenarioWarning

AGENTS = ("micro-min", "conceder:e=1", "hardliner", "random:p=0.7")


def small_config(**overrides):
    scenario = generate_scenario(GeneratorConfig(seed=5, issue_count=2, values_per_issue=3, seats=3))
    defaults = dict(
        strategies=AGENTS,
        scenarios=(scenario,),
        seats_per_session=3,
        deadline_rounds=25,
        master_seed=9,
        repetitions=1,
        workers=1,
    )
    defaults.update(overrides)
    return TournamentConfig(**defaults)


def test_triplet_counts():
    assert len(enumerate_triplets(["a", "b", "c", "d"], 3)) == 20
    assert enumerate_triplets(["solo"], 3) == [("solo", "solo", "solo")]
    assert len(enumerate_triplets(["a", "b"], 3)) == 4


def test_triplets_are_sorted_multisets():
    triplets = enumerate_triplets(["b", "a"], 2)
    assert triplets == [("a", "a"), ("a", "b"), ("b", "b")]


def test_assignment_counts():
    assert len(enumerate_assignments(3, [0, 1, 2])) == 6
    assert enumerate_assignments(2, "xy") == [(0, 1), (1, 0)]
    assert enumerate_assignments(1, "x") == [(0,)]
    with pytest.raises(ValueError):
        enumerate_assignments(3, [0, 1])


def test_full_tournament_row_count():
    rows = run_tournament(small_config())
    assert len(rows) == 20 * 6 * 3  # 120 sessions, one row per seat
    sessions = {(r.scenario, r.triplet, r.assignment, r.repetition) for r in rows}
    assert len(sessions) == 120
    for key in sessions:
        seats = [r.seat for r in rows if (r.scenario, r.triplet, r.assignment, r.repetition) == key]
        assert sorted(seats) == [0, 1, 2]


def test_empty_scenario_list_is_empty_success():
    assert run_tournament(small_config(scenarios=())) == []


def test_tournament_deterministic():
    assert run_tournament(small_config()) == run_tournament(small_config())


def test_worker_count_does_not_change_rows():
    assert run_tournament(small_config()) == run_tournament(small_config(workers=3))


def test_seed_isolation_across_repetitions():
    once = run_tournament(small_config())
    twice = run_tournament(small_config(repetitions=2))
    assert [r for r in twice if r.repetition == 0] == once


def test_master_seed_changes_results():
    a = run_tournament(small_config())
    b = run_tournament(small_config(master_seed=10))
    assert a != b


def test_short_scenarios_are_skipped_with_warning():
    two_seats = generate_scenario(GeneratorConfig(seed=8, issue_count=2, values_per_issue=2, seats=2))
    with pytest.warns(ScenarioWarning, match="skipping"):
        rows = run_tournament(small_config(scenarios=(two_seats,)))
    assert rows == []


def test_homogeneous_triplet_scores_every_seat():
    config = small_config(strategies=("micro-min",))
    rows = run_tournament(config)
    assert len(rows) == 6 * 3
    assert all(r.strategy == "micro-min" for r in rows)


def test_metrics_arithmetic_example():
    rows = [
        ResultRow("s", "a+a+a", 0, 0, i, "a", u, agreed, 5, 1)
        for i, (u, agreed) in enumerate([(1.0, True), (0.5, True), (0.0, False)])
    ]
    m = compute_metrics(rows)["a"]
    assert m.mean_utility == pytest.approx(0.5)
    assert m.agreement_rate == pytest.approx(2 / 3)
    assert m.utility_on_agreement == pytest.approx(0.75)


def test_metrics_constant_series_has_zero_stderr():
    rows = [ResultRow("s", "a+a+a", 0, 0, i, "a", 0.8, True, 5, 1) for i in range(3)]
    m = compute_metrics(rows)["a"]
    assert m.standard_error == 0.0


def test_metrics_no_agreements_leaves_on_agreement_absent():
    rows = [ResultRow("s", "a+a+a", 0, 0, i, "a", 0.1, False, 5, 1) for i in range(3)]
    m = compute_metrics(rows)["a"]
    assert m.utility_on_agreement is None
    assert m.agreement_rate == 0.0
    table = format_metrics_table({"a": m})
    assert "-" in table


def test_metrics_match_naive_recomputation():
    rows = run_tournament(small_config())
    metrics = compute_metrics(rows)
    for name, m in metrics.items():
        mine = [r.utility for r in rows if r.strategy == name]
        agreed = [r.utility for r in rows if r.strategy == name and r.agreement]
        mean = sum(mine) / len(mine)
        var = sum((u - mean) ** 2 for u in mine) / (len(mine) - 1)
        assert abs(m.mean_utility - mean) < 1e-12
        assert abs(m.standard_error - math.sqrt(var / len(mine))) < 1e-12
        assert abs(m.agreement_rate - len(agreed) / len(mine)) < 1e-12
        if agreed:
            assert abs(m.utility_on_agreement - sum(agreed) / len(agreed)) < 1e-12


def test_report_scales_by_hundred():
    metrics = {"a": AgentMetrics(0.8140,  0.0035, 0.8753, 0.9262, 1200)}
    table = format_metrics_table(metrics)
    assert "81.40 ± 0.35" in table
    assert "87.53" in table
    assert "92.62%" in table


def test_metrics_csv_columns():
    from negsim.report import write_metrics_csv

    metrics = {"a": AgentMetrics(0.8140, 0.0035, 0.8753, 0.9262, 1200)}
    buffer = io.StringIO()
    write_metrics_csv(metrics, buffer)
    lines = buffer.getvalue().splitlines()
    assert lines[0] == "strategy,mean_x100,stderr_x100,util_on_agreement_x100,agreement_rate_pct"
    assert lines[1] == "a,81.40,0.35,87.53,92.62"


def test_results_csv_round_trip():
    rows = run_tournament(small_config())
    buffer = io.StringIO()
    write_results_csv(rows, buffer)
    text = buffer.getvalue()
    assert text.splitlines()[0] == "scenario,triplet,assignment,repetition,seat,strategy,utility,agreement,rounds_used,seed"
    parsed = read_results_csv(io.StringIO(text))
    assert len(parsed) == len(rows)
    for orig, back in zip(rows, parsed):
        assert back.strategy == orig.strategy
        assert back.utility == pytest.approx(orig.utility, abs=5e-7)
        assert back.agreement == orig.agreement
        assert back.seed == orig.seed
