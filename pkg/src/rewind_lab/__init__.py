"""Draft-lottery orderings under the current plan, the Gold Plan and the Ex Post Gold Plan (REWIND)."""

from .ingest import parse_game_log, parse_league_config, read_season_snapshot, write_season_snapshot
from .lottery import (
    LotteryRanking,
    OddsTable,
    hybrid_draft_order,
    lottery_teams,
    randomized_reference_seed,
    rewind_ranking,
)
from .metrics import (
    GoldOutcome,
    PlanComparison,
    RewindOutcome,
    compare_plans,
    gold_outcome,
    rewind_outcome,
    rewind_target,
)
from .season import (
    GameResult,
    LeagueConfig,
    SeasonLog,
    conference_seeding,
    nth_loss_event,
    record_as_of,
    standings,
)
from .strategy import (
    MidSeasonState,
    Phase,
    StrengthModel,
    classify_phase,
    counterfactual_game_value,
    ex_post_regret,
    expected_score_delta,
    simulate_completions,
)

__version__ = "0.1.0"
