"""Season data model and standings algebra.

A season is an ordered list of decided games plus the league configuration.
Everything here is immutable; derived per-team sequences are cached on first use.
"""

from __future__ import annotations

import datetime as dt
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping, NamedTuple, Optional, Union

TeamId = str
Cutoff = Union[dt.date, int]

DEFAULT_SEASON_GAMES = 82
DEFAULT_REFERENCE_SEED = 6
DEFAULT_TARGET_BOUNDS = (29, 42)
DEFAULT_LOTTERY_SIZE = 14


class SeasonError(ValueError):
    """Invalid league configuration or season data."""


class UnknownTeamError(SeasonError, KeyError):
    pass


class IncompleteSeasonError(SeasonError):
    """Raised when a computation needs every team to have played a full season."""

    def __init__(self, shortfall: Mapping[TeamId, int]):
        self.shortfall = dict(shortfall)
        detail = ", ".join(f"{t} short {n}" for t, n in sorted(self.shortfall.items()))
        super().__init__(f"season is incomplete: {detail}")


@dataclass(frozen=True)
class LeagueConfig:
    conferences: Mapping[str, tuple[TeamId, ...]]
    season_games: int = DEFAULT_SEASON_GAMES
    reference_seed: int = DEFAULT_REFERENCE_SEED
    historical_target_bounds: tuple[int, int] = DEFAULT_TARGET_BOUNDS
    # Lottery population in official pre-lottery order; None means derive from records.
    lottery_teams: Optional[tuple[TeamId, ...]] = None
    lottery_size: int = DEFAULT_LOTTERY_SIZE
    lottery_odds: Optional[tuple[float, ...]] = None
    strengths: Mapping[TeamId, float] = field(default_factory=dict)
    home_advantage: float = 0.0

    def __post_init__(self):
        conferences = {str(k): tuple(v) for k, v in self.conferences.items()}
        object.__setattr__(self, "conferences", conferences)
        seen: dict[TeamId, str] = {}
        for conf, teams in conferences.items():
            if not teams:
                raise SeasonError(f"conference {conf!r} has no teams")
            for team in teams:
                if not isinstance(team, str) or not team:
                    raise SeasonError(f"invalid team code {team!r} in {conf!r}")
                if team in seen:
                    if seen[team] == conf:
                        raise SeasonError(f"duplicate team code {team!r} in {conf!r}")
                    raise SeasonError(f"team {team!r} is in both {seen[team]!r} and {conf!r}")
                seen[team] = conf
        if not seen:
            raise SeasonError("league has no teams")
        if self.season_games < 1:
            raise SeasonError("season_games must be positive")
        smallest = min(len(t) for t in conferences.values())
        if not 1 <= self.reference_seed <= smallest:
            raise SeasonError(
                f"reference_seed {self.reference_seed} must be between 1 and the "
                f"smallest conference size ({smallest})"
            )
        lo, hi = self.historical_target_bounds
        if not (0 < lo <= hi):
            raise SeasonError(f"invalid historical_target_bounds {self.historical_target_bounds}")
        object.__setattr__(self, "historical_target_bounds", (int(lo), int(hi)))
        if self.lottery_teams is not None:
            lottery = tuple(self.lottery_teams)
            for team in lottery:
                if team not in seen:
                    raise UnknownTeamError(team)
            if len(set(lottery)) != len(lottery):
                raise SeasonError("lottery_teams contains duplicates")
            object.__setattr__(self, "lottery_teams", lottery)
        if self.lottery_size < 0:
            raise SeasonError("lottery_size must be non-negative")
        if self.lottery_odds is not None:
            object.__setattr__(self, "lottery_odds", tuple(float(p) for p in self.lottery_odds))
        for team in self.strengths:
            if team not in seen:
                raise UnknownTeamError(team)
        object.__setattr__(self, "strengths", {t: float(s) for t, s in self.strengths.items()})

    @cached_property
    def conference_of(self) -> dict[TeamId, str]:
        return {team: conf for conf, teams in self.conferences.items() for team in teams}

    @property
    def teams(self) -> tuple[TeamId, ...]:
        return tuple(self.conference_of)

    def check_team(self, team: TeamId) -> None:
        if team not in self.conference_of:
            raise UnknownTeamError(team)

    def check_conference(self, conference: str) -> None:
        if conference not in self.conferences:
            raise SeasonError(f"unknown conference {conference!r}")


@dataclass(frozen=True)
class GameResult:
    date: dt.date
    home: TeamId
    away: TeamId
    winner: TeamId
    home_score: Optional[int] = None
    away_score: Optional[int] = None

    def __post_init__(self):
        if self.home == self.away:
            raise SeasonError(f"{self.date}: team {self.home!r} cannot play itself")
        if self.winner not in (self.home, self.away):
            raise SeasonError(f"{self.date}: winner {self.winner!r} did not play")

    @property
    def loser(self) -> TeamId:
        return self.away if self.winner == self.home else self.home

    def involves(self, team: TeamId) -> bool:
        return team == self.home or team == self.away

    def opponent(self, team: TeamId) -> TeamId:
        return self.away if team == self.home else self.home


class TeamGame(NamedTuple):
    """One game from a single team's point of view.

    ``number`` is the team's own 1-based game-sequence index; ``log_index`` points
    back into ``SeasonLog.games``.
    """

    number: int
    date: dt.date
    won: bool
    opponent: TeamId
    log_index: int


class LossEvent(NamedTuple):
    date: dt.date
    game_number: int
    log_index: int


@dataclass(frozen=True)
class SeasonLog:
    config: LeagueConfig
    games: tuple[GameResult, ...] = ()

    def __post_init__(self):
        games = tuple(self.games)
        object.__setattr__(self, "games", games)
        known = self.config.conference_of
        for i, g in enumerate(games):
            for team in (g.home, g.away):
                if team not in known:
                    raise UnknownTeamError(team)
            if i and g.date < games[i - 1].date:
                raise SeasonError(f"games out of date order at position {i}")

    @cached_property
    def team_games(self) -> dict[TeamId, tuple[TeamGame, ...]]:
        seqs: dict[TeamId, list[TeamGame]] = {t: [] for t in self.config.teams}
        for i, g in enumerate(self.games):
            for team in (g.home, g.away):
                seq = seqs[team]
                seq.append(TeamGame(len(seq) + 1, g.date, g.winner == team, g.opponent(team), i))
        return {t: tuple(s) for t, s in seqs.items()}

    def games_for(self, team: TeamId) -> tuple[TeamGame, ...]:
        self.config.check_team(team)
        return self.team_games[team]

    @property
    def dates(self) -> list[dt.date]:
        return sorted({g.date for g in self.games})

    def games_played(self) -> dict[TeamId, int]:
        return {t: len(seq) for t, seq in self.team_games.items()}

    def shortfall(self) -> dict[TeamId, int]:
        n = self.config.season_games
        return {t: n - k for t, k in self.games_played().items() if k != n}

    @property
    def is_complete(self) -> bool:
        return not self.shortfall()

    def require_complete(self) -> None:
        short = self.shortfall()
        if short:
            raise IncompleteSeasonError(short)

    def final_record(self, team: TeamId) -> tuple[int, int]:
        seq = self.games_for(team)
        wins = sum(g.won for g in seq)
        return wins, len(seq) - wins

    def find_game(self, team: TeamId, date: dt.date) -> int:
        """Log index of ``team``'s game on ``date``."""
        for g in self.games_for(team):
            if g.date == date:
                return g.log_index
        raise SeasonError(f"{team} has no game on {date}")

    def with_winner(self, log_index: int, winner: TeamId) -> "SeasonLog":
        """Copy of the log with one game's result set to ``winner``."""
        g = self.games[log_index]
        if not g.involves(winner):
            raise SeasonError(f"{winner!r} did not play game {log_index}")
        if g.winner == winner:
            return self
        games = list(self.games)
        games[log_index] = GameResult(g.date, g.home, g.away, winner, g.away_score, g.home_score)
        return SeasonLog(self.config, tuple(games))


def _within(game_date: dt.date, log_index: int, cutoff: Cutoff) -> bool:
    if isinstance(cutoff, dt.date):
        return game_date <= cutoff
    return log_index < cutoff


def record_as_of(log: SeasonLog, team: TeamId, cutoff: Cutoff) -> tuple[int, int]:
    """(wins, losses) through ``cutoff``.

    A date cutoff includes every game on or before that date. An integer cutoff
    is a prefix length of ``log.games``.
    """
    wins = losses = 0
    for g in log.games_for(team):
        if not _within(g.date, g.log_index, cutoff):
            break
        if g.won:
            wins += 1
        else:
            losses += 1
    return wins, losses


def _tally(log: SeasonLog, cutoff: Optional[Cutoff]) -> tuple[Counter, Counter]:
    wins: Counter = Counter()
    losses: Counter = Counter()
    for i, g in enumerate(log.games):
        if cutoff is not None and not _within(g.date, i, cutoff):
            break
        wins[g.winner] += 1
        losses[g.loser] += 1
    return wins, losses


def _seed_order(teams, wins: Mapping[TeamId, int]) -> list[TeamId]:
    # wins descending; ties broken by team code
    return sorted(teams, key=lambda t: (-wins.get(t, 0), t))


def conference_seeding(log: SeasonLog, conference: str, cutoff: Optional[Cutoff] = None) -> list[TeamId]:
    """Teams of ``conference`` best first; ``cutoff=None`` means end of season."""
    log.config.check_conference(conference)
    wins, _ = _tally(log, cutoff)
    return _seed_order(log.config.conferences[conference], wins)


@dataclass(frozen=True)
class StandingsSnapshot:
    cutoff: Optional[Cutoff]
    records: Mapping[TeamId, tuple[int, int]]
    seeding: Mapping[str, tuple[TeamId, ...]]
    # teams whose seed position was decided by the team-code tie-break
    tied: frozenset[TeamId]

    def seed_of(self, team: TeamId) -> int:
        for order in self.seeding.values():
            if team in order:
                return order.index(team) + 1
        raise UnknownTeamError(team)


def standings(log: SeasonLog, cutoff: Optional[Cutoff] = None) -> StandingsSnapshot:
    wins, losses = _tally(log, cutoff)
    records = {t: (wins.get(t, 0), losses.get(t, 0)) for t in log.config.teams}
    seeding = {}
    tied = set()
    for conf, teams in log.config.conferences.items():
        order = _seed_order(teams, wins)
        seeding[conf] = tuple(order)
        counts = Counter(wins.get(t, 0) for t in teams)
        tied.update(t for t in teams if counts[wins.get(t, 0)] > 1)
    return StandingsSnapshot(cutoff, records, seeding, frozenset(tied))


def nth_loss_event(log: SeasonLog, team: TeamId, n: int) -> Optional[LossEvent]:
    """Date and team game number of ``team``'s ``n``-th loss, or None if it never happens."""
    if n < 1:
        raise ValueError("n must be >= 1")
    losses = 0
    for g in log.games_for(team):
        if not g.won:
            losses += 1
            if losses == n:
                return LossEvent(g.date, g.number, g.log_index)
    return None
