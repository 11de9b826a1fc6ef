"""Scenario loading, generation, serialization, and Genius-XML compatibility.

The native on-disk format is JSON, UTF-8, no comments:

    {
      "name": "dinner",
      "issues": [{"name": "drink", "values": ["tea", "coffee"]}, ...],
      "profiles": [
        {
          "weights": {"drink": 0.6, ...},
          "evaluations": {"drink": {"tea": 1.0, "coffee": 0.5}, ...},
          "reservation": 0.0
        },
        ...
      ]
    }

Issue order in the file is authoritative and preserved. Weight and
evaluation keys must exactly match the declared issues and values.

A read-only subset of the Genius utility-space XML is also accepted, for
reusing profiles authored in that ecosystem (discrete weighted issues with
item evaluations only). Genius files are commonly un-normalized, so item
evaluations are divided by the per-issue maximum and weights are divided by
their sum when it is off by more than the weight tolerance; weight
normalization is reported through ScenarioWarning.
"""

from __future__ import annotations

import json
import random
import warnings
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from math import prod

from .domain import (
    DEFAULT_OUTCOME_CAP,
    WEIGHT_TOLERANCE,
    CapacityError,
    Issue,
    OutcomeSpace,
    Profile,
    Scenario,
    ValidationError,
)

__all__ = [
    "GeneratorConfig",
    "ParseError",
    "ScenarioWarning",
    "generate_scenario",
    "load_scenario",
    "load_scenario_file",
    "parse_genius_profile",
    "serialize_scenario",
]


class ParseError(ValueError):
    """The input document is not structurally valid."""


class ScenarioWarning(UserWarning):
    """Non-fatal oddity in scenario input (promoted to an error in strict mode)."""


def _require(mapping: dict, key: str, kind: type, where: str):
    if key not in mapping:
        raise ValidationError(f"{where}: missing field {key!r}")
    value = mapping[key]
    if not isinstance(value, kind):
        raise ValidationError(f"{where}.{key}: expected {kind.__name__}")
    return value


def load_scenario(data: bytes | str) -> Scenario:
    """Parse and validate a scenario from its JSON representation."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ParseError("scenario document must be a JSON object")

    name = _require(doc, "name", str, "scenario")
    raw_issues = _require(doc, "issues", list, "scenario")
    raw_profiles = _require(doc, "profiles", list, "scenario")

    issues = []
    for j, entry in enumerate(raw_issues):
        if not isinstance(entry, dict):
            raise ValidationError(f"issues[{j}]: expected object")
        issue_name = _require(entry, "name", str, f"issues[{j}]")
        values = _require(entry, "values", list, f"issues[{j}]")
        if not all(isinstance(v, str) for v in values):
            raise ValidationError(f"issues[{j}].values: all values must be strings")
        issues.append(Issue(issue_name, tuple(values)))
    space = OutcomeSpace(tuple(issues))

    profiles = []
    for i, entry in enumerate(raw_profiles):
        where = f"profiles[{i}]"
        if not isinstance(entry, dict):
            raise ValidationError(f"{where}: expected object")
        weights_map = _require(entry, "weights", dict, where)
        evals_map = _require(entry, "evaluations", dict, where)
        reservation = entry.get("reservation", 0.0)
        if not isinstance(reservation, (int, float)) or isinstance(reservation, bool):
            raise ValidationError(f"{where}.reservation: expected number")
        expected = {issue.name for issue in issues}
        if set(weights_map) != expected:
            raise ValidationError(
                f"{where}.weights: keys {sorted(weights_map)} do not match issues {sorted(expected)}"
            )
        if set(evals_map) != expected:
            raise ValidationError(
                f"{where}.evaluations: keys {sorted(evals_map)} do not match issues {sorted(expected)}"
            )
        weights = []
        rows = []
        for issue in issues:
            w = weights_map[issue.name]
            if not isinstance(w, (int, float)) or isinstance(w, bool):
                raise ValidationError(f"{where}.weights[{issue.name!r}]: expected number")
            weights.append(float(w))
            table = evals_map[issue.name]
            if not isinstance(table, dict):
                raise ValidationError(f"{where}.evaluations[{issue.name!r}]: expected object")
            if set(table) != set(issue.values):
                raise ValidationError(
                    f"{where}.evaluations[{issue.name!r}]: value labels {sorted(table)} "
                    f"do not match issue values {sorted(issue.values)}"
                )
            row = []
            for label in issue.values:
                e = table[label]
                if not isinstance(e, (int, float)) or isinstance(e, bool):
                    raise ValidationError(
                        f"{where}.evaluations[{issue.name!r}][{label!r}]: expected number"
                    )
                row.append(float(e))
            rows.append(tuple(row))
        total = sum(weights)
        if abs(total - 1.0) > WEIGHT_TOLERANCE:
            raise ValidationError(
                f"{where}.weights: sum is {total!r}, expected 1 within {WEIGHT_TOLERANCE}"
            )
        for issue, row in zip(issues, rows):
            for label, e in zip(issue.values, row):
                if not 0.0 <= e <= 1.0:
                    raise ValidationError(
                        f"{where}.evaluations[{issue.name!r}][{label!r}]: {e} outside [0, 1]"
                    )
        if not 0.0 <= reservation <= 1.0:
            raise ValidationError(f"{where}.reservation: {reservation} outside [0, 1]")
        profiles.append(Profile(tuple(weights), tuple(rows), float(reservation)))

    return Scenario(name, space, tuple(profiles))


def load_scenario_file(path) -> Scenario:
    """load_scenario over a file path, with the path named in errors."""
    with open(path, "rb") as fh:
        data = fh.read()
    try:
        return load_scenario(data)
    except (ParseError, ValidationError) as exc:
        raise type(exc)(f"{path}: {exc}") from exc


def serialize_scenario(scenario: Scenario) -> str:
    """Canonical JSON text for a scenario; load_scenario round-trips it exactly."""
    doc = {
        "name": scenario.name,
        "issues": [
            {"name": issue.name, "values": list(issue.values)} for issue in scenario.space.issues
        ],
        "profiles": [
            {
                "weights": {
                    issue.name: w for issue, w in zip(scenario.space.issues, profile.weights)
                },
                "evaluations": {
                    issue.name: dict(zip(issue.values, row))
                    for issue, row in zip(scenario.space.issues, profile.evaluations)
                },
                "reservation": profile.reservation,
            }
            for profile in scenario.profiles
        ],
    }
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


@dataclass(frozen=True)
class GeneratorConfig:
    """Parameters for the random scenario generator."""

    seed: int
    issue_count: int = 3
    values_per_issue: int | tuple[int, ...] = 4
    seats: int = 3
    reservation: float = 0.0

    def sizes(self) -> tuple[int, ...]:
        if isinstance(self.values_per_issue, int):
            return (self.values_per_issue,) * self.issue_count
        return tuple(self.values_per_issue)

    def validate(self, cap: int = DEFAULT_OUTCOME_CAP) -> None:
        if not 0 <= self.seed < 2**64:
            raise ValidationError(f"seed {self.seed} outside [0, 2^64)")
        if self.issue_count < 1:
            raise ValidationError("issue_count must be positive")
        sizes = self.sizes()
        if len(sizes) != self.issue_count:
            raise ValidationError(
                f"values_per_issue lists {len(sizes)} sizes for {self.issue_count} issues"
            )
        if any(s < 1 for s in sizes):
            raise ValidationError("every issue needs at least one value")
        if self.seats < 2:
            raise ValidationError("seats must be at least 2")
        if not 0.0 <= self.reservation <= 1.0:
            raise ValidationError(f"reservation {self.reservation} outside [0, 1]")
        k = prod(sizes)
        if k > cap:
            raise CapacityError(f"outcome space has {k} outcomes, exceeding the cap of {cap}")


def generate_scenario(config: GeneratorConfig, cap: int = DEFAULT_OUTCOME_CAP) -> Scenario:
    """Deterministic random scenario: same config, byte-identical scenario.

    Weights are drawn positive and normalized to sum 1; evaluations are drawn
    in (0, 1] and rescaled so the per-issue maximum is exactly 1, which makes
    every profile's best outcome utility exactly 1.0.
    """
    config.validate(cap)
    rng = random.Random(config.seed)
    sizes = config.sizes()
    issues = tuple(
        Issue(f"i{j}", tuple(f"v{v}" for v in range(size))) for j, size in enumerate(sizes)
    )
    space = OutcomeSpace(issues)

    profiles = []
    for _seat in range(config.seats):
        raw = [rng.uniform(0.2, 1.0) for _ in sizes]
        total = sum(raw)
        weights = [w / total for w in raw]
        # pin the float sum to exactly 1.0 so best-outcome utility is exactly 1
        partial = 0.0
        for w in weights[:-1]:
            partial += w
        weights[-1] = 1.0 - partial
        weights = tuple(weights)
        rows = []
        for size in sizes:
            draws = [rng.uniform(0.01, 1.0) for _ in range(size)]
            top = max(draws)
            rows.append(tuple(d / top for d in draws))
        profiles.append(Profile(weights, tuple(rows), config.reservation))

    shape = "x".join(str(s) for s in sizes)
    return Scenario(f"gen-{config.seed}-{shape}", space, tuple(profiles))


def parse_genius_profile(xml_text: str, space: OutcomeSpace) -> Profile:
    """Parse one preference profile from the Genius utility-space XML subset.

    Supported content: <issue type="discrete"> elements containing <item
    value=... evaluation=...> children, plus one <weight index=... value=...>
    per issue. Everything else is skipped with a ScenarioWarning. Issues and
    value labels must match the given outcome space. The reservation value is
    not part of this subset and defaults to 0.
    """
    try:
        root = ET.fromstring(xml_text)
    except ET.ParseError as exc:
        raise ParseError(f"invalid XML: {exc}") from exc

    known_names = {issue.name: j for j, issue in enumerate(space.issues)}
    evaluations: dict[str, dict[str, float]] = {}
    weights_by_index: dict[int, float] = {}
    issue_xml_index: dict[str, int] = {}

    wrapped = root.findall(".//objective")
    objectives = wrapped or [root]
    for objective in objectives:
        for child in objective:
            if child.tag == "issue":
                if child.get("type", "discrete") != "discrete":
                    raise ValidationError(
                        f"issue {child.get('name')!r}: only discrete issues are supported"
                    )
                issue_name = child.get("name")
                if issue_name not in known_names:
                    raise ValidationError(f"unknown issue {issue_name!r} not in outcome space")
                issue_xml_index[issue_name] = int(child.get("index", len(issue_xml_index) + 1))
                table: dict[str, float] = {}
                for item in child:
                    if item.tag != "item":
                        warnings.warn(
                            f"ignoring <{item.tag}> inside issue {issue_name!r}", ScenarioWarning
                        )
                        continue
                    label = item.get("value")
                    if item.get("evaluation") is None:
                        raise ParseError(f"issue {issue_name!r} item {label!r}: missing evaluation")
                    table[label] = float(item.get("evaluation"))
                evaluations[issue_name] = table
            elif child.tag == "weight":
                if child.get("index") is None or child.get("value") is None:
                    raise ParseError("weight element needs index and value attributes")
                weights_by_index[int(child.get("index"))] = float(child.get("value"))
            else:
                warnings.warn(f"ignoring unsupported element <{child.tag}>", ScenarioWarning)
    if wrapped and root.tag != "objective":
        for child in root:
            if child.tag != "objective":
                warnings.warn(f"ignoring unsupported element <{child.tag}>", ScenarioWarning)

    rows = []
    raw_weights = []
    for issue in space.issues:
        if issue.name not in evaluations:
            raise ValidationError(f"issue {issue.name!r}: no evaluations in document")
        table = evaluations[issue.name]
        unknown = set(table) - set(issue.values)
        if unknown:
            raise ValidationError(f"issue {issue.name!r}: unknown value labels {sorted(unknown)}")
        missing = set(issue.values) - set(table)
        if missing:
            raise ValidationError(f"issue {issue.name!r}: missing evaluations for {sorted(missing)}")
        evals = [table[label] for label in issue.values]
        if any(e < 0 for e in evals):
            raise ValidationError(f"issue {issue.name!r}: negative evaluation")
        top = max(evals)
        if top <= 0:
            raise ValidationError(f"issue {issue.name!r}: all evaluations are zero")
        rows.append(tuple(e / top for e in evals))
        xml_index = issue_xml_index[issue.name]
        if xml_index not in weights_by_index:
            raise ParseError(f"issue {issue.name!r}: missing weight element (index {xml_index})")
        raw_weights.append(weights_by_index[xml_index])

    total = sum(raw_weights)
    if total <= 0:
        raise ValidationError("weights sum to zero")
    if abs(total - 1.0) > WEIGHT_TOLERANCE:
        warnings.warn(f"weights sum to {total}; normalizing to 1", ScenarioWarning)
        raw_weights = [w / total for w in raw_weights]

    return Profile(tuple(raw_weights), tuple(rows), 0.0)
