"""Lottery rankings, the hybrid top-four draw, and reference-seed draws."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence, Union

import numpy as np

from .metrics import RewindOutcome
from .season import SeasonError, SeasonLog, TeamId

LOTTERY_PICKS = 4


class LotteryError(SeasonError):
    pass


@dataclass(frozen=True)
class RankingEntry:
    rank: int
    team: TeamId
    score: int
    total_losses: int
    tiebreak_applied: bool = False


@dataclass(frozen=True)
class LotteryRanking:
    entries: tuple[RankingEntry, ...]

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def teams(self) -> list[TeamId]:
        return [e.team for e in self.entries]

    def rank_of(self, team: TeamId) -> int:
        for e in self.entries:
            if e.team == team:
                return e.rank
        raise KeyError(team)


def rank_by_score(items: Iterable[tuple[TeamId, int, int]]) -> LotteryRanking:
    """Rank ``(team, score, total_losses)`` triples: score desc, then losses desc.

    Teams still level after both keys are ordered by team code.
    """
    items = list(items)
    score_counts = Counter(score for _, score, _ in items)
    ordered = sorted(items, key=lambda it: (-it[1], -it[2], it[0]))
    return LotteryRanking(tuple(
        RankingEntry(i, team, score, losses, score_counts[score] > 1)
        for i, (team, score, losses) in enumerate(ordered, 1)
    ))


def rewind_ranking(
    outcomes: Union[Mapping[TeamId, RewindOutcome], Sequence[RewindOutcome]],
    eligibility: Iterable[TeamId],
) -> LotteryRanking:
    if not isinstance(outcomes, Mapping):
        outcomes = {o.team: o for o in outcomes}
    items = []
    for team in eligibility:
        if team not in outcomes:
            raise LotteryError(f"no REWIND outcome for lottery team {team!r}")
        o = outcomes[team]
        items.append((team, o.score, o.total_losses))
    return rank_by_score(items)


def lottery_teams(log: SeasonLog) -> tuple[TeamId, ...]:
    """Lottery population in pre-lottery (current plan) order.

    Uses the config's explicit list when present, otherwise the ``lottery_size``
    worst records league-wide (most losses first, ties by team code).
    """
    config = log.config
    if config.lottery_teams is not None:
        return config.lottery_teams
    records = {t: log.final_record(t) for t in config.teams}
    worst = sorted(config.teams, key=lambda t: (-records[t][1], t))
    return tuple(worst[: min(config.lottery_size, len(worst))])


@dataclass(frozen=True)
class OddsTable:
    """Top-pick probability for each ranking position, best rank first."""

    weights: tuple[float, ...]

    def __post_init__(self):
        w = tuple(float(p) for p in self.weights)
        if not w:
            raise LotteryError("odds table is empty")
        if any(not math.isfinite(p) or p < 0 for p in w):
            raise LotteryError("odds must be finite and non-negative")
        if abs(sum(w) - 1.0) > 1e-6:
            raise LotteryError(f"odds must sum to 1, got {sum(w):.6g}")
        object.__setattr__(self, "weights", w)

    def __len__(self):
        return len(self.weights)

    @classmethod
    def parse(cls, text: str) -> "OddsTable":
        try:
            return cls(tuple(float(p) for p in text.replace(" ", "").split(",") if p))
        except ValueError:
            raise LotteryError(f"malformed odds {text!r}") from None

    def check_size(self, n: int) -> None:
        if len(self.weights) != n:
            raise LotteryError(f"odds table has {len(self.weights)} entries for {n} lottery teams")


def _draw_keys(weights: np.ndarray, rng: np.random.Generator, draws: int) -> np.ndarray:
    """Positions drawn without replacement, one row per draw.

    Sorting exponential(1) / weight keys reproduces sequential weighted
    sampling without replacement. Zero-weight positions sort last, in rank order.
    """
    n = len(weights)
    e = rng.exponential(size=(draws, n))
    with np.errstate(divide="ignore"):
        keys = np.where(weights > 0, e / np.where(weights > 0, weights, 1.0), np.inf)
    rank_pos = np.broadcast_to(np.arange(n), (draws, n))
    # lexsort: last key is primary
    return np.lexsort((rank_pos, keys), axis=1)


def _complete_order(ranking: LotteryRanking, winners: Sequence[int]) -> list[TeamId]:
    entries = ranking.entries
    order = [entries[i].team for i in winners]
    drawn = set(winners)
    rest = [i for i in range(len(entries)) if i not in drawn]
    # remaining picks by total losses, ranking order breaking ties
    rest.sort(key=lambda i: (-entries[i].total_losses, i))
    return order + [entries[i].team for i in rest]


def hybrid_draft_order(ranking: LotteryRanking, odds: OddsTable, rng_seed: Optional[int] = None) -> list[TeamId]:
    """Draw picks 1-4 by odds over the ranking; remaining picks go by total losses."""
    return simulate_draft_orders(ranking, odds, 1, rng_seed)[0]


def simulate_draft_orders(
    ranking: LotteryRanking, odds: OddsTable, draws: int, rng_seed: Optional[int] = None
) -> list[list[TeamId]]:
    if not len(ranking):
        raise LotteryError("cannot draw from an empty ranking")
    odds.check_size(len(ranking))
    if draws < 1:
        raise LotteryError("draws must be positive")
    rng = np.random.default_rng(rng_seed)
    picks = min(LOTTERY_PICKS, len(ranking))
    positions = _draw_keys(np.asarray(odds.weights), rng, draws)[:, :picks]
    return [_complete_order(ranking, row.tolist()) for row in positions]


def pick_frequencies(
    ranking: LotteryRanking, odds: OddsTable, draws: int, rng_seed: Optional[int] = None
) -> dict[TeamId, np.ndarray]:
    """Per-team empirical distribution over draft slots 1..n."""
    n = len(ranking)
    counts = {t: np.zeros(n) for t in ranking.teams}
    for order in simulate_draft_orders(ranking, odds, draws, rng_seed):
        for slot, team in enumerate(order):
            counts[team][slot] += 1
    return {t: c / draws for t, c in counts.items()}


def randomized_reference_seed(
    rng_seed: Optional[int],
    candidate_seeds: Sequence[int],
    weights: Optional[Sequence[float]] = None,
    conference_size: Optional[int] = None,
) -> int:
    """Draw which seed's losses define the REWIND target."""
    seeds = list(candidate_seeds)
    if not seeds:
        raise LotteryError("no candidate seeds")
    for s in seeds:
        if s < 1 or (conference_size is not None and s > conference_size):
            raise LotteryError(f"seed {s} is outside the conference")
    p = None
    if weights is not None:
        p = np.asarray(weights, dtype=float)
        if len(p) != len(seeds) or (p < 0).any() or p.sum() <= 0:
            raise LotteryError("seed weights must be non-negative, one per candidate")
        p = p / p.sum()
    rng = np.random.default_rng(rng_seed)
    return int(seeds[rng.choice(len(seeds), p=p)])
