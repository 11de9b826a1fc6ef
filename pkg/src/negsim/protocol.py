"""Stacked alternating offers engine for k >= 2 seats with round-based deadlines.

Seats act in fixed cyclic order 0, 1, ..., k-1. On its turn a seat either
proposes an outcome (replacing the standing offer and voiding earlier
acceptances), accepts the standing offer, or ends the negotiation. Agreement
is reached the moment all k-1 non-proposer seats have accepted the same
standing offer with no proposal in between.

The engine also maintains one concession ledger per seat: the set of distinct
outcomes that seat has proposed or accepted so far. Ledger sizes (and
plain distinct-proposal counts) are exposed to strategies through their
read-only view; concession strategies gate on them.

Deadlines are counted in rounds (full cycles of k turns), never wall-clock
time, so sessions are exactly reproducible.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING, Sequence

from .domain import Outcome, OutcomeSpace, Profile, Scenario, utility
from .seeding import derive_seed

if TYPE_CHECKING:
    from .agents import Strategy

__all__ = [
    "Accept",
    "Action",
    "End",
    "EndReason",
    "NegotiationState",
    "Propose",
    "SeatView",
    "SessionResult",
    "TranscriptRecord",
    "replay_actions",
    "run_session",
    "step",
    "transcript_to_jsonl",
]


@dataclass(frozen=True)
class Propose:
    outcome: Outcome


@dataclass(frozen=True)
class Accept:
    pass


@dataclass(frozen=True)
class End:
    pass


Action = Propose | Accept | End


class EndReason(str, Enum):
    AGREEMENT = "agreement"
    DEADLINE = "deadline"
    END = "end"


@dataclass(frozen=True)
class SessionResult:
    """Outcome of one negotiation session.

    On agreement every seat scores the utility of the agreed outcome; on
    deadline or walk-away every seat scores its reservation value.
    """

    agreement: Outcome | None
    utilities: tuple[float, ...]
    rounds_used: int
    ended_by: EndReason


@dataclass
class NegotiationState:
    """Mutable engine state for one session. step() advances it in place."""

    scenario: Scenario
    round: int = 0
    turn: int = 0
    standing_offer: tuple[Outcome, int] | None = None
    acceptors: set[int] = field(default_factory=set)
    history: list[tuple[int, Action]] = field(default_factory=list)
    ledgers: list[set[Outcome]] = field(default_factory=list)
    proposed: list[set[Outcome]] = field(default_factory=list)

    def __post_init__(self) -> None:
        k = len(self.scenario.profiles)
        if not self.ledgers:
            self.ledgers = [set() for _ in range(k)]
        if not self.proposed:
            self.proposed = [set() for _ in range(k)]

    @property
    def seats(self) -> int:
        return len(self.scenario.profiles)

    def ledger_sizes(self) -> tuple[int, ...]:
        return tuple(len(s) for s in self.ledgers)

    def proposal_counts(self) -> tuple[int, ...]:
        return tuple(len(s) for s in self.proposed)

    def rounds_used(self) -> int:
        # 1-based count of rounds touched so far
        return (len(self.history) + self.seats - 1) // self.seats


def _failure_result(state: NegotiationState, reason: EndReason) -> SessionResult:
    utilities = tuple(p.reservation for p in state.scenario.profiles)
    return SessionResult(None, utilities, state.rounds_used(), reason)


def _agreement_result(state: NegotiationState, outcome: Outcome) -> SessionResult:
    utilities = tuple(utility(p, outcome) for p in state.scenario.profiles)
    return SessionResult(outcome, utilities, state.rounds_used(), EndReason.AGREEMENT)


def _advance(state: NegotiationState) -> None:
    state.turn = (state.turn + 1) % state.seats
    if state.turn == 0:
        state.round += 1


def step(state: NegotiationState, action: Action) -> NegotiationState | SessionResult:
    """Apply one action for the seat whose turn it is.

    Returns the advanced state, or a SessionResult when the action terminates
    the session. Illegal actions (accepting with no standing offer, accepting
    one's own offer, proposing an invalid outcome) are demoted to End by the
    acting seat rather than aborting, so batch runs survive misbehaving
    strategies; the demotion is what gets recorded in the history.
    """
    seat = state.turn

    if isinstance(action, Propose):
        try:
            state.scenario.space.validate_outcome(action.outcome)
        except Exception:
            action = End()
        else:
            state.standing_offer = (action.outcome, seat)
            state.acceptors = set()
            state.ledgers[seat].add(action.outcome)
            state.proposed[seat].add(action.outcome)
            state.history.append((seat, action))
            _advance(state)
            return state

    if isinstance(action, Accept):
        if state.standing_offer is None or state.standing_offer[1] == seat:
            action = End()
        else:
            outcome, _proposer = state.standing_offer
            state.acceptors.add(seat)
            state.ledgers[seat].add(outcome)
            state.history.append((seat, action))
            if len(state.acceptors) == state.seats - 1:
                return _agreement_result(state, outcome)
            _advance(state)
            return state

    state.history.append((seat, End()))
    return _failure_result(state, EndReason.END)


@dataclass(frozen=True)
class SeatView:
    """Read-only slice of the session handed to a strategy on its turn.

    Strategies must not mutate anything reachable from the view. The rng is
    the seat's private stream, persistent across the seat's turns.
    """

    seat: int
    profile: Profile
    space: OutcomeSpace
    standing_offer: Outcome | None
    standing_proposer: int | None
    ledger_sizes: tuple[int, ...]
    proposal_counts: tuple[int, ...]
    round: int
    deadline_rounds: int
    history: Sequence[tuple[int, Action]]
    rng: random.Random


@dataclass(frozen=True)
class TranscriptRecord:
    """One action as recorded for export and replay."""

    round: int
    seat: int
    action: str
    outcome: Outcome | None
    ledger_sizes: tuple[int, ...]
    incident: str | None = None


def _record(
    state_round: int, seat: int, action: Action, state: NegotiationState, incident: str | None
) -> TranscriptRecord:
    if isinstance(action, Propose):
        kind, outcome = "propose", action.outcome
    elif isinstance(action, Accept):
        kind = "accept"
        outcome = state.standing_offer[0] if state.standing_offer else None
    else:
        kind, outcome = "end", None
    return TranscriptRecord(state_round, seat, kind, outcome, state.ledger_sizes(), incident)


def transcript_to_jsonl(records: Sequence[TranscriptRecord]) -> str:
    """Serialize a transcript as JSON lines, one record per action."""
    lines = []
    for r in records:
        doc: dict = {
            "round": r.round,
            "seat": r.seat,
            "action": r.action,
            "ledger_sizes": list(r.ledger_sizes),
        }
        if r.outcome is not None:
            doc["outcome"] = list(r.outcome)
        if r.incident is not None:
            doc["incident"] = r.incident
        lines.append(json.dumps(doc, ensure_ascii=False))
    return "\n".join(lines) + "\n" if lines else ""


def run_session(
    scenario: Scenario,
    strategies: Sequence["Strategy"],
    deadline_rounds: int = 1000,
    seed: int = 0,
) -> tuple[SessionResult, list[TranscriptRecord]]:
    """Drive a full session and return its result plus the action transcript.

    Each seat's strategy instance must be fresh (instances carry per-session
    state). Per-seat RNG streams are derived from (seed, seat), so a session
    is a pure function of (scenario, strategies, deadline_rounds, seed). A
    strategy that raises or returns a malformed action forfeits: the incident
    is recorded and the session ends with every seat at its reservation value.
    """
    k = len(scenario.profiles)
    if len(strategies) != k:
        raise ValueError(f"{len(strategies)} strategies for {k} profiles")
    if deadline_rounds < 1:
        raise ValueError("deadline_rounds must be at least 1")

    rngs = [random.Random(derive_seed(seed, "seat", i)) for i in range(k)]
    state = NegotiationState(scenario)
    transcript: list[TranscriptRecord] = []

    while state.round < deadline_rounds:
        seat = state.turn
        offer = state.standing_offer
        view = SeatView(
            seat=seat,
            profile=scenario.profiles[seat],
            space=scenario.space,
            standing_offer=offer[0] if offer else None,
            standing_proposer=offer[1] if offer else None,
            ledger_sizes=state.ledger_sizes(),
            proposal_counts=state.proposal_counts(),
            round=state.round,
            deadline_rounds=deadline_rounds,
            history=state.history,
            rng=rngs[seat],
        )
        incident = None
        try:
            action = strategies[seat].decide(view)
            if not isinstance(action, (Propose, Accept, End)):
                raise TypeError(f"strategy returned {type(action).__name__}, not an Action")
        except Exception as exc:
            incident = f"{type(exc).__name__}: {exc}"
            action = End()

        acting_round = state.round
        outcome = step(state, action)
        # step() may demote an illegal action; record what was actually applied
        applied_seat, applied = state.history[-1]
        if applied_seat == seat and type(applied) is not type(action) and incident is None:
            incident = f"illegal {type(action).__name__} demoted to End"
        transcript.append(_record(acting_round, seat, applied, state, incident))
        if isinstance(outcome, SessionResult):
            return outcome, transcript

    return _failure_result(state, EndReason.DEADLINE), transcript


def replay_actions(
    scenario: Scenario, actions: Sequence[Action], deadline_rounds: int
) -> SessionResult:
    """Re-run a recorded action sequence through step().

    Used to verify that transcripts are faithful: replaying a session's
    actions reproduces its SessionResult exactly.
    """
    state = NegotiationState(scenario)
    for action in actions:
        outcome = step(state, action)
        if isinstance(outcome, SessionResult):
            return outcome
    if state.round >= deadline_rounds:
        return _failure_result(state, EndReason.DEADLINE)
    raise ValueError("action sequence ended before any terminal condition")
