"""Core value types: outcome spaces, linear additive utilities, preference profiles.

All types here are immutable after construction and safe to share across
concurrent tournament workers. Utilities are normalized to [0, 1]; profiles
that violate that (or whose weights do not sum to 1) are rejected outright
rather than silently rescaled.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache, reduce
from itertools import product
from math import prod

import numpy as np

__all__ = [
    "DEFAULT_OUTCOME_CAP",
    "WEIGHT_TOLERANCE",
    "CapacityError",
    "Issue",
    "Outcome",
    "OutcomeSpace",
    "Profile",
    "Scenario",
    "ValidationError",
    "enumerate_outcomes",
    "sorted_outcomes",
    "utilities_vector",
    "utility",
]

Outcome = tuple[int, ...]
"""A complete assignment: one value index per issue, in issue order."""

DEFAULT_OUTCOME_CAP = 10_000_000

WEIGHT_TOLERANCE = 1e-9


class ValidationError(ValueError):
    """A domain object or argument violates one of its invariants."""


class CapacityError(RuntimeError):
    """An outcome space is larger than the configured enumeration cap."""


@dataclass(frozen=True)
class Issue:
    """One negotiable dimension with a fixed, ordered set of discrete values."""

    name: str
    values: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", tuple(self.values))
        if not self.values:
            raise ValidationError(f"issue {self.name!r}: needs at least one value")
        if len(set(self.values)) != len(self.values):
            raise ValidationError(f"issue {self.name!r}: duplicate value labels")

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class OutcomeSpace:
    """The cartesian product of all issue domains, in fixed issue order."""

    issues: tuple[Issue, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "issues", tuple(self.issues))
        if not self.issues:
            raise ValidationError("outcome space needs at least one issue")
        names = [issue.name for issue in self.issues]
        if len(set(names)) != len(names):
            raise ValidationError("duplicate issue names in outcome space")

    @property
    def size(self) -> int:
        """Total number of outcomes K."""
        return prod(len(issue) for issue in self.issues)

    def validate_outcome(self, outcome: Outcome) -> None:
        if len(outcome) != len(self.issues):
            raise ValidationError(
                f"outcome has {len(outcome)} indices, space has {len(self.issues)} issues"
            )
        for idx, issue in zip(outcome, self.issues):
            if not 0 <= idx < len(issue):
                raise ValidationError(
                    f"issue {issue.name!r}: value index {idx} out of range [0, {len(issue)})"
                )

    def flat_index(self, outcome: Outcome) -> int:
        """Rank of an outcome in lexicographic enumeration order."""
        self.validate_outcome(outcome)
        flat = 0
        for idx, issue in zip(outcome, self.issues):
            flat = flat * len(issue) + idx
        return flat

    def outcome_at(self, flat: int) -> Outcome:
        """Inverse of flat_index."""
        if not 0 <= flat < self.size:
            raise ValidationError(f"flat index {flat} out of range [0, {self.size})")
        indices = []
        for issue in reversed(self.issues):
            flat, idx = divmod(flat, len(issue))
            indices.append(idx)
        return tuple(reversed(indices))

    def labels(self, outcome: Outcome) -> tuple[str, ...]:
        """Human-readable value labels for an outcome."""
        self.validate_outcome(outcome)
        return tuple(issue.values[idx] for idx, issue in zip(outcome, self.issues))


@dataclass(frozen=True)
class Profile:
    """A linear additive utility function plus a reservation value.

    Weights and evaluation rows are positional, aligned with the issues of the
    outcome space the profile belongs to (evaluation row j maps value index ->
    evaluation for issue j). Weights must sum to 1 within WEIGHT_TOLERANCE and
    every evaluation must lie in [0, 1].
    """

    weights: tuple[float, ...]
    evaluations: tuple[tuple[float, ...], ...]
    reservation: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        object.__setattr__(
            self, "evaluations", tuple(tuple(float(e) for e in row) for row in self.evaluations)
        )
        if len(self.weights) != len(self.evaluations):
            raise ValidationError(
                f"{len(self.weights)} weights but {len(self.evaluations)} evaluation rows"
            )
        if not self.weights:
            raise ValidationError("profile needs at least one issue")
        for j, w in enumerate(self.weights):
            if w < 0.0:
                raise ValidationError(f"weight {j} is negative ({w})")
        total = sum(self.weights)
        if abs(total - 1.0) > WEIGHT_TOLERANCE:
            raise ValidationError(f"weights sum to {total!r}, expected 1 within {WEIGHT_TOLERANCE}")
        for j, row in enumerate(self.evaluations):
            if not row:
                raise ValidationError(f"evaluation row {j} is empty")
            for v, e in enumerate(row):
                if not 0.0 <= e <= 1.0:
                    raise ValidationError(f"evaluation [{j}][{v}] = {e} outside [0, 1]")
        if not 0.0 <= self.reservation <= 1.0:
            raise ValidationError(f"reservation {self.reservation} outside [0, 1]")


@dataclass(frozen=True)
class Scenario:
    """A named outcome space plus one preference profile per negotiation seat."""

    name: str
    space: OutcomeSpace
    profiles: tuple[Profile, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "profiles", tuple(self.profiles))
        if len(self.profiles) < 2:
            raise ValidationError(f"scenario {self.name!r}: needs at least 2 profiles")
        sizes = tuple(len(issue) for issue in self.space.issues)
        for i, profile in enumerate(self.profiles):
            if len(profile.weights) != len(sizes):
                raise ValidationError(
                    f"scenario {self.name!r}: profile {i} covers {len(profile.weights)} issues, "
                    f"space has {len(sizes)}"
                )
            for j, row in enumerate(profile.evaluations):
                if len(row) != sizes[j]:
                    raise ValidationError(
                        f"scenario {self.name!r}: profile {i} evaluation row {j} has "
                        f"{len(row)} entries, issue {self.space.issues[j].name!r} has {sizes[j]} values"
                    )

    def with_seats(self, k: int) -> "Scenario":
        """Scenario restricted to the first k profiles."""
        if k < 2 or k > len(self.profiles):
            raise ValidationError(
                f"scenario {self.name!r}: cannot take {k} seats from {len(self.profiles)} profiles"
            )
        if k == len(self.profiles):
            return self
        return Scenario(self.name, self.space, self.profiles[:k])


def utility(profile: Profile, outcome: Outcome) -> float:
    """Linear additive utility: the weighted sum of per-issue evaluations.

    Summation is strictly left to right across issues so that results are
    bit-identical with utilities_vector().
    """
    if len(outcome) != len(profile.weights):
        raise ValidationError(
            f"outcome has {len(outcome)} indices, profile covers {len(profile.weights)} issues"
        )
    total = 0.0
    for w, row, idx in zip(profile.weights, profile.evaluations, outcome):
        if not 0 <= idx < len(row):
            raise ValidationError(f"value index {idx} out of range [0, {len(row)})")
        total += w * row[idx]
    return total


def _check_cap(space: OutcomeSpace, cap: int) -> None:
    k = space.size
    if k > cap:
        raise CapacityError(f"outcome space has {k} outcomes, exceeding the cap of {cap}")


def enumerate_outcomes(space: OutcomeSpace, cap: int = DEFAULT_OUTCOME_CAP) -> list[Outcome]:
    """All K outcomes in lexicographic index order.

    Raises CapacityError when K exceeds the cap (full enumeration is required
    by the concession strategies, so pathological spaces are rejected early).
    """
    _check_cap(space, cap)
    ranges = [range(len(issue)) for issue in space.issues]
    return list(product(*ranges))


@lru_cache(maxsize=256)
def utilities_vector(profile: Profile, space: OutcomeSpace, cap: int = DEFAULT_OUTCOME_CAP) -> np.ndarray:
    """Utility of every outcome, indexed by flat enumeration rank.

    Built as a chain of outer sums over per-issue contribution arrays; the
    flattened C order of that chain is exactly lexicographic enumeration
    order, and the per-element association matches utility()'s left-to-right
    accumulation. The returned array is cached and must not be mutated.
    """
    _check_cap(space, cap)
    parts = [
        w * np.asarray(row, dtype=np.float64)
        for w, row in zip(profile.weights, profile.evaluations)
    ]
    table = reduce(np.add.outer, parts)
    flat = np.ascontiguousarray(table).ravel()
    flat.setflags(write=False)
    return flat


@lru_cache(maxsize=256)
def sorted_order(profile: Profile, space: OutcomeSpace, cap: int = DEFAULT_OUTCOME_CAP) -> np.ndarray:
    """Flat outcome ranks sorted by descending utility, ties by ascending rank."""
    utils = utilities_vector(profile, space, cap)
    order = np.argsort(-utils, kind="stable")
    order.setflags(write=False)
    return order


def sorted_outcomes(
    profile: Profile, space: OutcomeSpace, cap: int = DEFAULT_OUTCOME_CAP
) -> list[Outcome]:
    """All outcomes in descending utility order for the given profile.

    Equal-utility outcomes keep ascending lexicographic assignment order, so
    the result is a deterministic complete preference ordering.
    """
    order = sorted_order(profile, space, cap)
    return [space.outcome_at(int(i)) for i in order]
