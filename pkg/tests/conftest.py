"""Shared builders for the test suite."""

from __future__ import annotations

import pytest

from negsim import Issue, OutcomeSpace, Profile, Scenario


def make_profile(weights, rows, reservation=0.0) -> Profile:
    return Profile(tuple(weights), tuple(tuple(r) for r in rows), reservation)


@pytest.fixture
def two_issue_space() -> OutcomeSpace:
    return OutcomeSpace(
        (
            Issue("drink", ("tea", "coffee")),
            Issue("size", ("small", "medium", "large")),
        )
    )


@pytest.fixture
def two_issue_scenario(two_issue_space) -> Scenario:
    p0 = make_profile((0.6, 0.4), ((1.0, 0.25), (0.1, 0.5, 1.0)))
    p1 = make_profile((0.3, 0.7), ((0.2, 1.0), (1.0, 0.6, 0.1)))
    p2 = make_profile((0.5, 0.5), ((1.0, 0.0), (0.0, 1.0, 0.5)))
    return Scenario("cafe", two_issue_space, (p0, p1, p2))


@pytest.fixture
def shared_best_scenario() -> Scenario:
    """Three identical profiles with a unique best outcome."""
    space = OutcomeSpace((Issue("item", ("x", "y", "z")),))
    profile = make_profile((1.0,), ((1.0, 0.6, 0.2),))
    return Scenario("aligned", space, (profile, profile, profile))
