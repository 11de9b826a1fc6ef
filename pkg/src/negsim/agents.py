"""Concession strategies: the micro-concession family plus baseline opponents.

The micro-concession strategy ("micro" in the registry) keeps a list of all
outcomes sorted by its own utility and walks down it one offer at a time, but
only concedes a new offer when the opponents have collectively matched its
own count of distinct concessions; otherwise it repeats an earlier offer at
random. With several opponents the match test aggregates their counts with
min, max, or mean:

  * min  - concede only when every opponent has conceded at least as much
           (the conservative reading: never be the most generous at the table);
  * max  - concede when the most active opponent has matched you
           (exploitable by a single hardliner);
  * mean - concede when opponents keep up on average.

Counting only distinct *proposals* deadlocks with three or more seats: one
seat can keep accepting a repeated offer that a third seat keeps rejecting,
and nobody's count ever moves. The fix is to count an accepted outcome as a
concession too, so each seat's tally is the size of its ledger of outcomes
proposed-or-accepted. That is the default; `count_acceptances=False`
(registry name micro-min-nofix) preserves the deadlock-prone behavior for
comparison. Bilaterally the two are indistinguishable because the first
acceptance already ends the session.

Baselines: a time-based conceder with tunable curvature, a hardliner that
never concedes, and a random bidder for stress tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from .domain import Outcome, OutcomeSpace, Profile, sorted_order, utilities_vector, utility
from .protocol import Accept, Action, End, Propose, SeatView

__all__ = [
    "Hardliner",
    "MicroConfig",
    "MicroState",
    "MicroStrategy",
    "RandomBidder",
    "Strategy",
    "TimeConceder",
    "Variant",
    "aggregate_opponent_count",
    "make_strategy",
    "micro_accepts",
    "micro_decide",
    "micro_threshold",
    "registry_names",
]


class Strategy:
    """Per-session decision policy: one fresh instance per seat per session.

    Implementations read the SeatView (never mutate it) and return a legal
    Action. Any per-session state lives on the instance.
    """

    name = "strategy"

    def decide(self, view: SeatView) -> Action:
        raise NotImplementedError


class _Ranking:
    """A profile's view of the outcome space: utilities by flat rank plus the
    descending-utility order. Shared helper for all list-walking strategies."""

    def __init__(self, profile: Profile, space: OutcomeSpace):
        self.space = space
        self.flat_utils = utilities_vector(profile, space)
        order = sorted_order(profile, space)
        self.order: list[Outcome] = [space.outcome_at(int(i)) for i in order]
        self.utils: list[float] = [float(u) for u in self.flat_utils[order]]

    def utility_of(self, outcome: Outcome) -> float:
        return float(self.flat_utils[self.space.flat_index(outcome)])


class Variant(str, Enum):
    MIN = "min"
    MAX = "max"
    MEAN = "mean"


@dataclass(frozen=True)
class MicroConfig:
    variant: Variant
    count_acceptances: bool = True


def aggregate_opponent_count(variant: Variant, counts: list[int]) -> int | Fraction:
    """Collapse per-opponent concession counts into one gate value.

    The mean is kept as an exact rational so gate comparisons never suffer
    rounding. With a single opponent all three variants coincide.
    """
    if not counts:
        raise ValueError("need at least one opponent count")
    if variant is Variant.MIN:
        return min(counts)
    if variant is Variant.MAX:
        return max(counts)
    return Fraction(sum(counts), len(counts))


@dataclass
class MicroState:
    """Working state for one micro-concession seat.

    `order` is the full outcome list sorted by descending own utility (ties by
    ascending assignment); `utils` is aligned with it. The first `m` entries
    are exactly the offers proposed so far, in order. `own_count` and
    `opponent_agg` are refreshed from the view before every decision: ledger
    sizes when acceptances count, distinct-proposal counts otherwise.
    """

    order: list[Outcome]
    utils: list[float]
    rv: float
    m: int = 0
    own_count: int = 0
    opponent_agg: int | Fraction = 0

    @property
    def proposed(self) -> list[Outcome]:
        return self.order[: self.m]

    @property
    def exhausted(self) -> bool:
        return self.m >= len(self.order)

    def would_propose_new(self) -> bool:
        """True when the gate is open: opponents have kept up, the next offer
        exists, and it is still worth at least the reservation value."""
        return (
            not self.exhausted
            and self.utils[self.m] >= self.rv
            and self.own_count <= self.opponent_agg
        )

    def threshold_position(self) -> int:
        if self.m == 0:
            return 0
        if self.would_propose_new():
            return self.m
        return self.m - 1


def micro_threshold(state: MicroState) -> Outcome:
    """The lowest-utility offer the agent is currently willing to put forward.

    That is the next list entry while the gate is open, the last proposed
    offer once the gate has closed, and the top offer before anything was
    proposed.
    """
    return state.order[state.threshold_position()]


def micro_accepts(u_offer: float, u_low: float, rv: float) -> bool:
    """Accept exactly when the offer is no worse than both the current
    concession threshold and the reservation value."""
    return u_offer >= max(u_low, rv)


def micro_decide(
    config: MicroConfig, state: MicroState, view: SeatView, u_offer: float | None = None
) -> Action:
    """One turn of the micro-concession policy; mutates `state`.

    Order matters: accept if the standing offer clears the threshold; else
    concede the next list entry if the gate is open; else repeat a uniformly
    random earlier offer; and when there is nothing to repeat because even the
    top offer is below reservation, walk away.

    `u_offer` is the standing offer's utility under the agent's own profile;
    passing it in lets callers reuse a precomputed table (MicroStrategy does).
    """
    counts = view.ledger_sizes if config.count_acceptances else view.proposal_counts
    state.own_count = counts[view.seat] if config.count_acceptances else state.m
    state.opponent_agg = aggregate_opponent_count(
        config.variant, [c for i, c in enumerate(counts) if i != view.seat]
    )

    if view.standing_offer is not None:
        if u_offer is None:
            u_offer = utility(view.profile, view.standing_offer)
        u_low = state.utils[state.threshold_position()]
        if micro_accepts(u_offer, u_low, state.rv):
            return Accept()

    if state.would_propose_new():
        offer = state.order[state.m]
        state.m += 1
        return Propose(offer)

    if state.m > 0:
        return Propose(state.order[view.rng.randrange(state.m)])

    return End()


class MicroStrategy(Strategy):
    """Registry wrapper binding a MicroConfig to a lazily built MicroState."""

    def __init__(self, config: MicroConfig, name: str):
        self.config = config
        self.name = name
        self._ranking: _Ranking | None = None
        self._state: MicroState | None = None

    def decide(self, view: SeatView) -> Action:
        if self._state is None:
            self._ranking = _Ranking(view.profile, view.space)
            self._state = MicroState(
                order=self._ranking.order,
                utils=self._ranking.utils,
                rv=view.profile.reservation,
            )
        u_offer = None
        if view.standing_offer is not None:
            u_offer = self._ranking.utility_of(view.standing_offer)
        return micro_decide(self.config, self._state, view, u_offer)


class TimeConceder(Strategy):
    """Deadline-driven conceder with aspiration rv + (1-rv) * (1 - t^(1/e)).

    t is the fraction of rounds used. e=1 concedes linearly, e<1 holds out
    (Boulware-like), e>1 gives ground early. Accepts anything at or above the
    current aspiration; proposes down its sorted list as the aspiration falls,
    repeating its last offer when nothing new qualifies.
    """

    def __init__(self, exponent: float = 1.0, name: str | None = None):
        if exponent <= 0:
            raise ValueError(f"conceder exponent must be positive, got {exponent}")
        self.exponent = exponent
        self.name = name or f"conceder:e={exponent}"
        self._ranking: _Ranking | None = None
        self._m = 0

    def target(self, t: float, rv: float) -> float:
        return rv + (1.0 - rv) * (1.0 - t ** (1.0 / self.exponent))

    def decide(self, view: SeatView) -> Action:
        if self._ranking is None:
            self._ranking = _Ranking(view.profile, view.space)
        rv = view.profile.reservation
        target = self.target(view.round / view.deadline_rounds, rv)

        if view.standing_offer is not None:
            if self._ranking.utility_of(view.standing_offer) >= target:
                return Accept()

        order, utils = self._ranking.order, self._ranking.utils
        if self._m < len(order) and utils[self._m] >= target:
            self._m += 1
            return Propose(order[self._m - 1])
        if self._m > 0:
            return Propose(order[self._m - 1])
        # aspiration above even the best outcome and nothing proposed yet
        self._m = 1
        return Propose(order[0])


class Hardliner(Strategy):
    """Never concedes: always re-proposes its single best outcome and accepts
    only offers at least as good as that."""

    name = "hardliner"

    def __init__(self):
        self._ranking: _Ranking | None = None

    def decide(self, view: SeatView) -> Action:
        if self._ranking is None:
            self._ranking = _Ranking(view.profile, view.space)
        best, u_best = self._ranking.order[0], self._ranking.utils[0]
        if view.standing_offer is not None:
            if self._ranking.utility_of(view.standing_offer) >= u_best:
                return Accept()
        return Propose(best)


class RandomBidder(Strategy):
    """Stress-test opponent: accepts above a fixed utility threshold, else
    proposes a uniformly random outcome from its own stream."""

    def __init__(self, accept_threshold: float = 0.5, name: str | None = None):
        if not 0.0 <= accept_threshold <= 1.0:
            raise ValueError(f"accept threshold must be in [0, 1], got {accept_threshold}")
        self.accept_threshold = accept_threshold
        self.name = name or f"random:p={accept_threshold}"
        self._ranking: _Ranking | None = None

    def decide(self, view: SeatView) -> Action:
        if self._ranking is None:
            self._ranking = _Ranking(view.profile, view.space)
        if view.standing_offer is not None:
            if self._ranking.utility_of(view.standing_offer) >= self.accept_threshold:
                return Accept()
        flat = view.rng.randrange(view.space.size)
        return Propose(view.space.outcome_at(flat))


_MICRO_NAMES = {
    "micro-min": MicroConfig(Variant.MIN, count_acceptances=True),
    "micro-max": MicroConfig(Variant.MAX, count_acceptances=True),
    "micro-mean": MicroConfig(Variant.MEAN, count_acceptances=True),
    "micro-min-nofix": MicroConfig(Variant.MIN, count_acceptances=False),
}


def registry_names() -> list[str]:
    """Canonical agent names accepted by make_strategy (and the CLI)."""
    return [*_MICRO_NAMES, "conceder:e=<real>", "hardliner", "random:p=<real>"]


def make_strategy(name: str) -> Strategy:
    """Build a fresh strategy instance from its registry name.

    Parameterized forms: `conceder:e=0.5`, `random:p=0.3`. Bare `conceder`
    and `random` use e=1.0 and p=0.5.
    """
    if name in _MICRO_NAMES:
        return MicroStrategy(_MICRO_NAMES[name], name)
    if name == "hardliner":
        return Hardliner()
    base, _, param = name.partition(":")
    try:
        if base == "conceder":
            exponent = float(param.removeprefix("e=")) if param else 1.0
            return TimeConceder(exponent, name)
        if base == "random":
            threshold = float(param.removeprefix("p=")) if param else 0.5
            return RandomBidder(threshold, name)
    except ValueError as exc:
        raise ValueError(f"bad parameter in agent name {name!r}: {exc}") from exc
    raise ValueError(f"unknown agent {name!r}; known agents: {', '.join(registry_names())}")
