"""Command-line interface.

Subcommands: gen-scenario, run, tournament, analyze, egt. Exit codes: 0 on
success, 1 on runtime or data errors, 2 on usage errors. Every command is a
deterministic function of its flags; randomness always flows from --seed.
"""

from __future__ import annotations

import warnings
from pathlib import Path

import click

from . import fixtures
from .agents import make_strategy, registry_names
from .domain import CapacityError, ValidationError, utilities_vector
from .egt import build_best_response_graph, build_payoff_table, emit_best_response_graph, find_pure_nash, load_payoff_csv
from .protocol import run_session, transcript_to_jsonl
from .report import (
    format_best_responses,
    format_metrics_table,
    format_payoff_table,
    render_best_response_graph,
    render_metrics_chart,
    write_metrics_csv,
)
from .scenario_io import GeneratorConfig, ParseError, ScenarioWarning, generate_scenario, load_scenario_file, serialize_scenario
from .tournament import TournamentConfig, compute_metrics, read_results_csv, run_tournament, write_results_csv

_DATA_ERRORS = (ValidationError, CapacityError, ParseError, ValueError, OSError)


def _strict(enabled: bool) -> None:
    if enabled:
        warnings.simplefilter("error", ScenarioWarning)


def _resolve_input(path: str) -> Path:
    """Existing file path, falling back to a bundled fixture of the same name."""
    p = Path(path)
    if p.is_file():
        return p
    try:
        bundled = fixtures.fixture_path(Path(path).name)
    except FileNotFoundError:
        raise click.ClickException(f"no such file: {path}")
    click.echo(f"note: using bundled fixture {bundled}", err=True)
    return bundled


def _parse_agents(spec: str) -> list[str]:
    names = [part.strip() for part in spec.split(",") if part.strip()]
    if not names:
        raise click.UsageError("agent list is empty")
    for name in names:
        try:
            make_strategy(name)
        except ValueError:
            raise click.UsageError(
                f"unknown agent {name!r}; known agents: {', '.join(registry_names())}"
            )
    return names


def _parse_values(spec: str) -> int | tuple[int, ...]:
    try:
        parts = [int(p) for p in spec.split(",")]
    except ValueError:
        raise click.BadParameter(f"expected an integer or comma list, got {spec!r}")
    if any(p < 1 for p in parts):
        raise click.BadParameter("every issue needs at least one value")
    return parts[0] if len(parts) == 1 else tuple(parts)


@click.group()
@click.version_option(package_name="negsim")
def main():
    """Multilateral negotiation simulator and analysis toolkit."""


@main.command("gen-scenario")
@click.option("--seed", type=click.IntRange(0, 2**64 - 1), default=0, show_default=True)
@click.option("--issues", type=click.IntRange(min=1), default=3, show_default=True)
@click.option("--values", default="4", show_default=True, help="Values per issue, or a comma list.")
@click.option("--seats", type=click.IntRange(min=2), default=3, show_default=True)
@click.option("--reservation", type=click.FloatRange(0.0, 1.0), default=0.0, show_default=True)
@click.option("-o", "--out", required=True, type=click.Path(dir_okay=False, writable=True))
def gen_scenario(seed, issues, values, seats, reservation, out):
    """Generate a random scenario file (deterministic in --seed)."""
    config = GeneratorConfig(
        seed=seed,
        issue_count=issues,
        values_per_issue=_parse_values(values),
        seats=seats,
        reservation=reservation,
    )
    try:
        config.validate()
    except (ValidationError, CapacityError) as exc:
        raise click.UsageError(str(exc))
    scenario = generate_scenario(config)
    Path(out).write_text(serialize_scenario(scenario), encoding="utf-8")
    click.echo(f"wrote {out}: {scenario.name}, {scenario.space.size} outcomes, {len(scenario.profiles)} profiles")
    for i, profile in enumerate(scenario.profiles):
        utils = utilities_vector(profile, scenario.space)
        click.echo(f"  profile {i}: utility range [{utils.min():.4f}, {utils.max():.4f}], reservation {profile.reservation}")


@main.command("run")
@click.option("-s", "--scenario", "scenario_path", required=True)
@click.option("-a", "--agents", "agents_spec", required=True, help="Comma-separated agent names.")
@click.option("--deadline", type=click.IntRange(min=1), default=1000, show_default=True)
@click.option("--seed", type=click.IntRange(0, 2**64 - 1), default=0, show_default=True)
@click.option("--transcript", type=click.Path(dir_okay=False, writable=True), help="Write a JSON-lines transcript here.")
@click.option("--strict", is_flag=True, help="Treat scenario warnings as errors.")
def run_cmd(scenario_path, agents_spec, deadline, seed, transcript, strict):
    """Run a single negotiation session and print the result."""
    _strict(strict)
    names = _parse_agents(agents_spec)
    try:
        scenario = load_scenario_file(_resolve_input(scenario_path))
        if len(scenario.profiles) < len(names):
            raise ValidationError(
                f"scenario has {len(scenario.profiles)} profiles but {len(names)} agents were given"
            )
        seated = scenario.with_seats(len(names))
        strategies = [make_strategy(name) for name in names]
        result, records = run_session(seated, strategies, deadline, seed)
    except _DATA_ERRORS as exc:
        raise click.ClickException(str(exc))

    click.echo(f"scenario: {seated.name} ({seated.space.size} outcomes, {len(names)} seats)")
    click.echo(f"ended by: {result.ended_by.value} after {result.rounds_used} round(s)")
    if result.agreement is not None:
        labels = seated.space.labels(result.agreement)
        pairs = ", ".join(f"{issue.name}={label}" for issue, label in zip(seated.space.issues, labels))
        click.echo(f"agreement: {pairs}")
    else:
        click.echo("agreement: none (all seats score their reservation value)")
    for seat, (name, u) in enumerate(zip(names, result.utilities)):
        click.echo(f"  seat {seat}  {name:<18} utility {u:.4f}")
    for record in records:
        if record.incident:
            click.echo(f"  incident at round {record.round}, seat {record.seat}: {record.incident}", err=True)
    if transcript:
        Path(transcript).write_text(transcript_to_jsonl(records), encoding="utf-8")
        click.echo(f"transcript: {transcript} ({len(records)} actions)")


@main.command("tournament")
@click.option("--scenarios", "scenario_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("-a", "--agents", "agents_spec", required=True, help="Comma-separated agent names.")
@click.option("--seats", type=click.IntRange(min=2), default=3, show_default=True)
@click.option("--deadline", type=click.IntRange(min=1), default=1000, show_default=True)
@click.option("--seed", type=click.IntRange(0, 2**64 - 1), default=0, show_default=True)
@click.option("--reps", type=click.IntRange(min=1), default=1, show_default=True)
@click.option("--workers", type=click.IntRange(min=1), default=1, show_default=True)
@click.option("--strict", is_flag=True, help="Treat scenario warnings as errors.")
@click.option("-o", "--out", "out_dir", required=True, type=click.Path(file_okay=False))
def tournament_cmd(scenario_dir, agents_spec, seats, deadline, seed, reps, workers, strict, out_dir):
    """Run the full tournament and write results, metrics, and a chart."""
    _strict(strict)
    names = _parse_agents(agents_spec)
    paths = sorted(Path(scenario_dir).glob("*.json"))
    if not paths:
        raise click.ClickException(f"no scenario files (*.json) in {scenario_dir}")
    scenarios = []
    for path in paths:
        try:
            scenarios.append(load_scenario_file(path))
        except _DATA_ERRORS as exc:
            if strict:
                raise click.ClickException(str(exc))
            warnings.warn(f"skipping unreadable scenario {path}: {exc}", ScenarioWarning)
    if not scenarios:
        raise click.ClickException(f"no loadable scenarios in {scenario_dir}")

    config = TournamentConfig(
        strategies=tuple(names),
        scenarios=tuple(scenarios),
        seats_per_session=seats,
        deadline_rounds=deadline,
        master_seed=seed,
        repetitions=reps,
        workers=workers,
    )
    try:
        rows = run_tournament(config)
    except ScenarioWarning as exc:
        raise click.ClickException(str(exc))
    metrics = compute_metrics(rows)

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "results.csv", "w", encoding="utf-8", newline="") as fh:
        write_results_csv(rows, fh)
    with open(out / "metrics.csv", "w", encoding="utf-8", newline="") as fh:
        write_metrics_csv(metrics, fh)
    table = format_metrics_table(metrics)
    (out / "metrics.txt").write_text(table, encoding="utf-8")
    render_metrics_chart(metrics, out / "metrics.png")

    sessions = len(rows) // seats if rows else 0
    click.echo(f"{sessions} sessions, {len(rows)} rows -> {out / 'results.csv'}")
    click.echo(table, nl=False)


@main.command("analyze")
@click.argument("results_csv", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--out", "out_dir", type=click.Path(file_okay=False), help="Also write metrics.csv/.txt/.png here.")
def analyze_cmd(results_csv, out_dir):
    """Recompute the metrics report from an existing results CSV."""
    try:
        with open(results_csv, encoding="utf-8", newline="") as fh:
            rows = read_results_csv(fh)
    except _DATA_ERRORS as exc:
        raise click.ClickException(str(exc))
    if not rows:
        raise click.ClickException(f"{results_csv} has no data rows")
    metrics = compute_metrics(rows)
    table = format_metrics_table(metrics)
    if out_dir:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "metrics.csv", "w", encoding="utf-8", newline="") as fh:
            write_metrics_csv(metrics, fh)
        (out / "metrics.txt").write_text(table, encoding="utf-8")
        render_metrics_chart(metrics, out / "metrics.png")
    click.echo(table, nl=False)


@main.command("egt")
@click.option("--results", "results_csv", type=click.Path(dir_okay=False), help="Per-seat results CSV to aggregate first.")
@click.option("--payoff", "payoff_csv", type=click.Path(dir_okay=False), help="Payoff table CSV to use directly.")
@click.option("--dot", "dot_path", type=click.Path(dir_okay=False, writable=True), help="Write the best-response graph as DOT.")
@click.option("--fig", "fig_path", type=click.Path(dir_okay=False, writable=True), help="Render the best-response graph as an image.")
@click.option("--all-improving", is_flag=True, help="Also emit non-best improving deviations (dashed).")
def egt_cmd(results_csv, payoff_csv, dot_path, fig_path, all_improving):
    """Game analysis: payoff table, best responses, equilibria, graph."""
    if bool(results_csv) == bool(payoff_csv):
        raise click.UsageError("give exactly one of --results or --payoff")
    try:
        if payoff_csv:
            with open(_resolve_input(payoff_csv), encoding="utf-8", newline="") as fh:
                table = load_payoff_csv(fh)
        else:
            with open(_resolve_input(results_csv), encoding="utf-8", newline="") as fh:
                table = build_payoff_table(read_results_csv(fh))
    except _DATA_ERRORS as exc:
        raise click.ClickException(str(exc))

    click.echo("payoff per opponent pair:")
    click.echo(format_payoff_table(table), nl=False)
    click.echo()
    click.echo(format_best_responses(table), nl=False)
    click.echo()
    equilibria = find_pure_nash(table)
    if equilibria:
        click.echo("pure Nash equilibria:")
        for node in equilibria:
            click.echo(f"  {{{', '.join(node)}}}{_selfplay_note(table, node)}")
    else:
        click.echo("pure Nash equilibria: none")

    if dot_path:
        Path(dot_path).write_text(emit_best_response_graph(table, all_improving), encoding="utf-8")
        click.echo(f"dot graph: {dot_path}")
    if fig_path:
        graph = build_best_response_graph(table, all_improving)
        render_best_response_graph(graph, fig_path)
        click.echo(f"figure: {fig_path}")


def _selfplay_note(table, node) -> str:
    if len(set(node)) == 1:
        return f"  (self-play payoff {table.get(node[0], (node[0], node[0])):.4f})"
    return ""


if __name__ == "__main__":
    main()
