"""negsim: multilateral negotiation simulator and analysis toolkit.

A deterministic stacked-alternating-offers engine for k >= 2 seats, the
micro-concession strategy family plus baseline opponents, a combinatorial
tournament runner with per-agent metrics, and empirical game analysis
(best responses, pure Nash equilibria, best-response graphs).
"""

from .agents import (
    Hardliner,
    MicroConfig,
    MicroState,
    MicroStrategy,
    RandomBidder,
    Strategy,
    TimeConceder,
    Variant,
    aggregate_opponent_count,
    make_strategy,
    micro_accepts,
    micro_decide,
    micro_threshold,
    registry_names,
)
from .domain import (
    DEFAULT_OUTCOME_CAP,
    CapacityError,
    Issue,
    Outcome,
    OutcomeSpace,
    Profile,
    Scenario,
    ValidationError,
    enumerate_outcomes,
    sorted_outcomes,
    utilities_vector,
    utility,
)
from .egt import (
    BestResponse,
    BestResponseGraph,
    CompletenessError,
    PayoffTable,
    best_response,
    best_response_frequency,
    build_best_response_graph,
    build_payoff_table,
    emit_best_response_graph,
    find_pure_nash,
    load_payoff_csv,
)
from .protocol import (
    Accept,
    Action,
    End,
    EndReason,
    NegotiationState,
    Propose,
    SeatView,
    SessionResult,
    TranscriptRecord,
    replay_actions,
    run_session,
    step,
    transcript_to_jsonl,
)
from .scenario_io import (
    GeneratorConfig,
    ParseError,
    ScenarioWarning,
    generate_scenario,
    load_scenario,
    load_scenario_file,
    parse_genius_profile,
    serialize_scenario,
)
from .seeding import derive_seed
from .tournament import (
    AgentMetrics,
    ResultRow,
    TournamentConfig,
    compute_metrics,
    enumerate_assignments,
    enumerate_triplets,
    read_results_csv,
    run_tournament,
    write_results_csv,
)

__version__ = "0.1.0"
