"""Per-team lottery metrics under the three plans.

* current plan: total losses at the end of the season
* Gold Plan: wins after simplified mathematical elimination, i.e. the first
  date when a team's losses plus the reference-seed team's wins exceed the
  season length
* Ex Post Gold Plan: wins after the team's REWIND date, the date of its
  (L+1)-th loss where L is the final loss total of its conference's
  reference seed
"""

from __future__ import annotations

import datetime as dt
from collections import Counter
from dataclasses import dataclass
from typing import Optional

from .season import (
    LossEvent,
    SeasonLog,
    TeamId,
    conference_seeding,
    nth_loss_event,
)


@dataclass(frozen=True)
class RewindOutcome:
    team: TeamId
    target: int
    rewind_date: Optional[LossEvent]
    rewind_wins: int
    total_wins: int
    total_losses: int
    score: int

    @property
    def eligible(self) -> bool:
        """False for teams that never reached the target (never eliminated ex post)."""
        return self.rewind_date is not None

    @property
    def note(self) -> str:
        return "" if self.eligible else "ineligible"


@dataclass(frozen=True)
class GoldOutcome:
    team: TeamId
    elimination_date: Optional[dt.date]
    wins_at_elimination: int
    losses_at_elimination: int
    total_wins: int
    score: int
    # reference-seed team and its record on the elimination date
    reference_team: Optional[TeamId] = None
    reference_record: Optional[tuple[int, int]] = None


@dataclass(frozen=True)
class PlanComparison:
    team: TeamId
    current_metric: int
    gold: GoldOutcome
    rewind: RewindOutcome


@dataclass(frozen=True)
class ReferenceSeed:
    conference: str
    team: TeamId
    wins: int
    losses: int

    @property
    def target(self) -> int:
        return self.losses + 1


def reference_seed_team(log: SeasonLog, conference: str) -> ReferenceSeed:
    log.require_complete()
    order = conference_seeding(log, conference)
    team = order[log.config.reference_seed - 1]
    wins, losses = log.final_record(team)
    return ReferenceSeed(conference, team, wins, losses)


def rewind_target(log: SeasonLog, conference: str) -> int:
    """One more than the final losses of the conference's reference seed."""
    return reference_seed_team(log, conference).target


def rewind_targets(log: SeasonLog) -> dict[str, int]:
    return {conf: rewind_target(log, conf) for conf in log.config.conferences}


def rewind_outcome(log: SeasonLog, team: TeamId, target: Optional[int] = None) -> RewindOutcome:
    log.config.check_team(team)
    log.require_complete()
    if target is None:
        target = rewind_target(log, log.config.conference_of[team])
    total_wins, total_losses = log.final_record(team)
    event = nth_loss_event(log, team, target)
    if event is None:
        return RewindOutcome(team, target, None, total_wins, total_wins, total_losses, 0)
    # the event game is the team's target-th loss, so the games before it hold game_number - target wins
    rewind_wins = event.game_number - target
    return RewindOutcome(team, target, event, rewind_wins, total_wins, total_losses, total_wins - rewind_wins)


def rewind_outcomes(log: SeasonLog) -> dict[TeamId, RewindOutcome]:
    targets = rewind_targets(log)
    conf_of = log.config.conference_of
    return {t: rewind_outcome(log, t, targets[conf_of[t]]) for t in log.config.teams}


def gold_outcomes(log: SeasonLog) -> dict[TeamId, GoldOutcome]:
    """Gold Plan outcome for every team, scanning standings at the end of each game date."""
    log.require_complete()
    config = log.config
    k = config.reference_seed
    n = config.season_games
    wins: Counter = Counter()
    losses: Counter = Counter()
    eliminated: dict[TeamId, tuple[dt.date, int, int, TeamId, tuple[int, int]]] = {}

    games = log.games
    i = 0
    while i < len(games):
        day = games[i].date
        while i < len(games) and games[i].date == day:
            wins[games[i].winner] += 1
            losses[games[i].loser] += 1
            i += 1
        for conf, teams in config.conferences.items():
            pending = [t for t in teams if t not in eliminated]
            if not pending:
                continue
            order = sorted(teams, key=lambda t: (-wins[t], t))
            ref = order[k - 1]
            ref_wins = wins[ref]
            for t in pending:
                if losses[t] + ref_wins > n:
                    eliminated[t] = (day, wins[t], losses[t], ref, (ref_wins, losses[ref]))

    out = {}
    for t in config.teams:
        total = wins[t]
        if t in eliminated:
            day, w, l, ref, rec = eliminated[t]
            out[t] = GoldOutcome(t, day, w, l, total, total - w, ref, rec)
        else:
            out[t] = GoldOutcome(t, None, total, losses[t], total, 0)
    return out


def gold_outcome(log: SeasonLog, team: TeamId) -> GoldOutcome:
    log.config.check_team(team)
    return gold_outcomes(log)[team]


def compare_plans(log: SeasonLog, team: TeamId) -> PlanComparison:
    log.config.check_team(team)
    rewind = rewind_outcome(log, team)
    return PlanComparison(team, rewind.total_losses, gold_outcome(log, team), rewind)
