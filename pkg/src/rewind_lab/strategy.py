"""The tanking team's decision problem.

Phase classification from historical target bounds, single-game
counterfactuals on a finished season, and Monte Carlo completion of a
mid-season state under a logistic pairwise strength model.
"""

from __future__ import annotations

import datetime as dt
import enum
import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple, Optional, Sequence

import numpy as np
from scipy.special import expit

from .metrics import rewind_outcome
from .season import GameResult, LeagueConfig, SeasonError, SeasonLog, TeamId

BLOCK_SIZE = 8192
_P_CLIP = 1e-12


class Phase(enum.Enum):
    DEFINITE_LOSE = "definite-lose"
    UNCERTAIN = "uncertain"
    DEFINITE_WIN = "definite-win"


def classify_phase(losses_so_far: int, bounds: tuple[int, int]) -> Phase:
    """Phase of the team's next game given its current loss count.

    ``bounds`` are the smallest and largest plausible REWIND targets.
    """
    min_target, max_target = bounds
    if losses_so_far + 1 <= min_target:
        return Phase.DEFINITE_LOSE
    if losses_so_far >= max_target:
        return Phase.DEFINITE_WIN
    return Phase.UNCERTAIN


def counterfactual_game_value(log: SeasonLog, team: TeamId, game_number: int) -> int:
    """REWIND score if ``team`` wins its ``game_number``-th game minus the score if it loses.

    All other results are held fixed; the target is recomputed in each branch.
    """
    seq = log.games_for(team)
    if not 1 <= game_number <= len(seq):
        raise SeasonError(f"{team} has no game number {game_number}")
    g = seq[game_number - 1]
    win = log.with_winner(g.log_index, team)
    loss = log.with_winner(g.log_index, g.opponent)
    return rewind_outcome(win, team).score - rewind_outcome(loss, team).score


def ex_post_regret(log: SeasonLog, team: TeamId, intended_losses: Iterable[int]) -> int:
    """How many intentional losses (team game numbers) fell after the realized REWIND date."""
    seq = log.games_for(team)
    numbers = set(intended_losses)
    for n in numbers:
        if not 1 <= n <= len(seq):
            raise SeasonError(f"{team} has no game number {n}")
        if seq[n - 1].won:
            raise SeasonError(f"{team} won game {n}; it cannot be an intentional loss")
    event = rewind_outcome(log, team).rewind_date
    if event is None:
        return 0
    return sum(1 for n in numbers if n > event.game_number)


@dataclass(frozen=True)
class StrengthModel:
    """P(a beats b) = logistic(strength_a - strength_b [+ home_advantage if a is home])."""

    strengths: Mapping[TeamId, float] = field(default_factory=dict)
    home_advantage: float = 0.0

    @classmethod
    def from_config(cls, config: LeagueConfig) -> "StrengthModel":
        return cls(dict(config.strengths), config.home_advantage)

    def strength(self, team: TeamId) -> float:
        return self.strengths.get(team, 0.0)

    def p_win(self, team: TeamId, opponent: TeamId, home: Optional[bool] = None) -> float:
        diff = self.strength(team) - self.strength(opponent)
        if home is True:
            diff += self.home_advantage
        elif home is False:
            diff -= self.home_advantage
        return float(np.clip(expit(diff), _P_CLIP, 1 - _P_CLIP))

    def p_home(self, home: TeamId, away: TeamId) -> float:
        return self.p_win(home, away, home=True)


def fit_strengths(log: SeasonLog, iterations: int = 500, prior_games: float = 1.0, tol: float = 1e-10) -> StrengthModel:
    """Bradley-Terry strengths fitted to played games by MM iteration.

    Each team gets ``prior_games`` virtual games (half won) against a
    league-average opponent so unbeaten or winless teams stay finite.
    """
    teams = list(log.config.teams)
    idx = {t: i for i, t in enumerate(teams)}
    n = len(teams)
    wins = np.zeros((n, n))
    for g in log.games:
        wins[idx[g.winner], idx[g.loser]] += 1
    played = wins + wins.T
    total_wins = wins.sum(axis=1) + prior_games / 2
    p = np.ones(n)
    for _ in range(iterations):
        denom = (played / (p[:, None] + p[None, :])).sum(axis=1) + prior_games / (p + 1.0)
        new = total_wins / denom
        new /= np.exp(np.log(new).mean())
        done = np.max(np.abs(new - p)) < tol
        p = new
        if done:
            break
    return StrengthModel({t: float(np.log(p[idx[t]])) for t in teams}, 0.0)


class ScheduledGame(NamedTuple):
    date: dt.date
    home: TeamId
    away: TeamId


class _Slot(NamedTuple):
    date: dt.date
    home: TeamId
    away: TeamId
    winner: Optional[TeamId]


@dataclass(frozen=True)
class MidSeasonState:
    """Games already decided plus the unplayed remainder of the schedule."""

    config: LeagueConfig
    slots: tuple[_Slot, ...]

    def __post_init__(self):
        known = self.config.conference_of
        counts: Counter = Counter()
        for s in self.slots:
            if s.home not in known or s.away not in known:
                raise SeasonError(f"unknown team in scheduled game {s}")
            if s.home == s.away:
                raise SeasonError(f"{s.home} cannot play itself")
            counts[s.home] += 1
            counts[s.away] += 1
        bad = {t: counts[t] for t in known if counts[t] != self.config.season_games}
        if bad:
            detail = ", ".join(f"{t}: {k}" for t, k in sorted(bad.items()))
            raise SeasonError(f"schedule must give every team {self.config.season_games} games ({detail})")

    @classmethod
    def build(cls, played: SeasonLog, remaining: Iterable[ScheduledGame]) -> "MidSeasonState":
        slots = [_Slot(g.date, g.home, g.away, g.winner) for g in played.games]
        slots += [_Slot(s.date, s.home, s.away, None) for s in remaining]
        # stable: decided games come first within a date
        slots.sort(key=lambda s: s.date)
        return cls(played.config, tuple(slots))

    @classmethod
    def from_log(
        cls, log: SeasonLog, as_of: Optional[dt.date] = None, unplayed: Iterable[int] = ()
    ) -> "MidSeasonState":
        """Split a complete log: games after ``as_of`` and the listed log indices become unplayed."""
        hidden = set(unplayed)
        slots = tuple(
            _Slot(g.date, g.home, g.away,
                  None if (i in hidden or (as_of is not None and g.date > as_of)) else g.winner)
            for i, g in enumerate(log.games)
        )
        return cls(log.config, slots)

    @property
    def played(self) -> SeasonLog:
        return SeasonLog(self.config, tuple(
            GameResult(s.date, s.home, s.away, s.winner) for s in self.slots if s.winner is not None
        ))

    @property
    def remaining(self) -> list[ScheduledGame]:
        return [ScheduledGame(s.date, s.home, s.away) for s in self.slots if s.winner is None]

    def completed(self, winners: Sequence[TeamId]) -> SeasonLog:
        """Season log with the remaining games decided by ``winners`` (schedule order)."""
        it = iter(winners)
        games = [GameResult(s.date, s.home, s.away, s.winner if s.winner is not None else next(it))
                 for s in self.slots]
        return SeasonLog(self.config, tuple(games))

    def next_game(self, team: TeamId) -> Optional[int]:
        """Index into ``remaining`` of the team's first unplayed game."""
        self.config.check_team(team)
        r = 0
        for s in self.slots:
            if s.winner is None:
                if team in (s.home, s.away):
                    return r
                r += 1
        return None


class _Plan:
    """Index arrays that turn a matrix of sampled home-win flags into per-team result sequences."""

    def __init__(self, state: MidSeasonState):
        config = state.config
        self.config = config
        self.teams = list(config.teams)
        self.dates: dict[TeamId, list[dt.date]] = defaultdict(list)
        fixed: dict[TeamId, list[bool]] = defaultdict(list)
        var_col: dict[TeamId, list[int]] = defaultdict(list)
        var_home: dict[TeamId, list[bool]] = defaultdict(list)
        self.remaining: list[_Slot] = []
        for s in state.slots:
            r = None
            if s.winner is None:
                r = len(self.remaining)
                self.remaining.append(s)
            for team in (s.home, s.away):
                self.dates[team].append(s.date)
                if r is None:
                    fixed[team].append(s.winner == team)
                    var_col[team].append(-1)
                    var_home[team].append(False)
                else:
                    fixed[team].append(False)
                    var_col[team].append(r)
                    var_home[team].append(team == s.home)
        self.fixed = {t: np.array(fixed[t], dtype=bool) for t in self.teams}
        self.col = {t: np.array(var_col[t], dtype=np.int64) for t in self.teams}
        self.is_var = {t: self.col[t] >= 0 for t in self.teams}
        self.home = {t: np.array(var_home[t], dtype=bool) for t in self.teams}

    def p_home(self, model: StrengthModel) -> np.ndarray:
        return np.array([model.p_home(s.home, s.away) for s in self.remaining], dtype=float)

    def scores(self, home_wins: np.ndarray) -> tuple[dict[str, np.ndarray], dict[TeamId, tuple[np.ndarray, np.ndarray]]]:
        """Targets per conference and (score, rewind game index or -1) per team, one entry per replica."""
        reps = home_wins.shape[0]
        n = self.config.season_games
        k = self.config.reference_seed
        results = {}
        for t in self.teams:
            won = np.broadcast_to(self.fixed[t], (reps, n)).copy()
            var = self.is_var[t]
            if var.any():
                sampled = home_wins[:, self.col[t][var]]
                won[:, var] = np.where(self.home[t][var], sampled, ~sampled)
            results[t] = won
        targets = {}
        for conf, teams in self.config.conferences.items():
            wins = np.stack([results[t].sum(axis=1) for t in teams], axis=1)
            kth = -np.sort(-wins, axis=1)[:, k - 1]
            targets[conf] = n - kth + 1
        out = {}
        for t in self.teams:
            won = results[t]
            target = targets[self.config.conference_of[t]]
            cum_losses = np.cumsum(~won, axis=1)
            reached = cum_losses >= target[:, None]
            has = reached[:, -1]
            pos = np.where(has, reached.argmax(axis=1), -1)
            total = won.sum(axis=1)
            # wins through the target-loss game = games through it minus target losses
            rewind_wins = pos + 1 - target
            score = np.where(has, total - rewind_wins, 0)
            out[t] = (score, pos)
        return targets, out


def _block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, block]))


def _replica_blocks(replicas: int):
    for b, start in enumerate(range(0, replicas, BLOCK_SIZE)):
        yield b, min(BLOCK_SIZE, replicas - start)


def _resolve_seed(rng_seed: Optional[int]) -> int:
    if rng_seed is None:
        return int(np.random.SeedSequence().entropy % (2**63))
    return int(rng_seed)


def _probs(counter: Counter, total: int) -> dict:
    return {k: v / total for k, v in sorted(counter.items(), key=lambda kv: (kv[0] is None, kv[0]))}


@dataclass(frozen=True)
class TargetDistribution:
    replicas: int
    rng_seed: int
    target_probs: Mapping[str, Mapping[int, float]]
    score_probs: Mapping[TeamId, Mapping[int, float]]
    # rewind date -> probability; None key means the team was never eliminated ex post
    rewind_date_probs: Mapping[TeamId, Mapping[Optional[dt.date], float]]

    def target_mean(self, conference: str) -> float:
        return sum(t * p for t, p in self.target_probs[conference].items())

    def target_quantile(self, conference: str, q: float) -> int:
        acc = 0.0
        items = sorted(self.target_probs[conference].items())
        for t, p in items:
            acc += p
            if acc >= q - 1e-12:
                return t
        return items[-1][0]

    def mean_score(self, team: TeamId) -> float:
        return sum(s * p for s, p in self.score_probs[team].items())

    def score_stderr(self, team: TeamId) -> float:
        mean = self.mean_score(team)
        var = sum(p * (s - mean) ** 2 for s, p in self.score_probs[team].items())
        if self.replicas < 2:
            return math.nan
        return math.sqrt(var * self.replicas / (self.replicas - 1) / self.replicas)


def simulate_completions(
    state: MidSeasonState, model: StrengthModel, replicas: int, rng_seed: Optional[int] = None
) -> TargetDistribution:
    """Sample the rest of the season ``replicas`` times and tabulate REWIND quantities.

    Replicas are generated in fixed-size blocks, block ``b`` drawing from a
    stream seeded by ``(rng_seed, b)``, so results do not depend on how blocks
    are scheduled.
    """
    if replicas < 1:
        raise ValueError("replicas must be >= 1")
    seed = _resolve_seed(rng_seed)
    plan = _Plan(state)
    p = plan.p_home(model)
    target_counts = {c: Counter() for c in state.config.conferences}
    score_counts = {t: Counter() for t in plan.teams}
    date_counts = {t: Counter() for t in plan.teams}
    for b, size in _replica_blocks(replicas):
        u = _block_rng(seed, b).random((size, len(p)))
        targets, scores = plan.scores(u < p)
        for c, arr in targets.items():
            target_counts[c].update(Counter(arr.tolist()))
        for t, (score, pos) in scores.items():
            score_counts[t].update(Counter(score.tolist()))
            dates = plan.dates[t]
            for i, cnt in Counter(pos.tolist()).items():
                date_counts[t][None if i < 0 else dates[i]] += cnt
    return TargetDistribution(
        replicas,
        seed,
        {c: _probs(cnt, replicas) for c, cnt in target_counts.items()},
        {t: _probs(cnt, replicas) for t, cnt in score_counts.items()},
        {t: _probs(cnt, replicas) for t, cnt in date_counts.items()},
    )


@dataclass(frozen=True)
class DeltaEstimate:
    estimate: float
    stderr: float
    mean_if_win: float
    mean_if_loss: float
    replicas: int
    rng_seed: int
    game: ScheduledGame


def expected_score_delta(
    state: MidSeasonState,
    team: TeamId,
    model: StrengthModel,
    replicas: int,
    rng_seed: Optional[int] = None,
    next_game: Optional[ScheduledGame] = None,
) -> DeltaEstimate:
    """E[final score | team wins next game] - E[final score | team loses it].

    Both branches reuse the same draws for every other unplayed game.
    """
    if replicas < 1:
        raise ValueError("replicas must be >= 1")
    r = state.next_game(team)
    if r is None:
        raise SeasonError(f"{team} has no unplayed games")
    plan = _Plan(state)
    game = ScheduledGame(*plan.remaining[r][:3])
    if next_game is not None and tuple(next_game) != tuple(game):
        raise SeasonError(f"{team}'s next unplayed game is {game}, not {next_game}")
    team_home = game.home == team
    seed = _resolve_seed(rng_seed)
    p = plan.p_home(model)
    total = total_sq = win_sum = loss_sum = 0.0
    for b, size in _replica_blocks(replicas):
        hw = _block_rng(seed, b).random((size, len(p))) < p
        hw[:, r] = team_home
        _, win_scores = plan.scores(hw)
        hw[:, r] = not team_home
        _, loss_scores = plan.scores(hw)
        sw = win_scores[team][0].astype(float)
        sl = loss_scores[team][0].astype(float)
        d = sw - sl
        total += d.sum()
        total_sq += (d * d).sum()
        win_sum += sw.sum()
        loss_sum += sl.sum()
    mean = total / replicas
    if replicas > 1:
        var = max(total_sq - replicas * mean * mean, 0.0) / (replicas - 1)
        stderr = math.sqrt(var / replicas)
    else:
        stderr = math.nan
    return DeltaEstimate(mean, stderr, win_sum / replicas, loss_sum / replicas, replicas, seed, game)
