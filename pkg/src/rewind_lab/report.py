"""Tables that mirror the layouts used to present lottery results.

Builders here only arrange values computed by the library; they make no
decisions of their own.
"""

from __future__ import annotations

import csv
import datetime as dt
import io
import json
import math
from dataclasses import dataclass, field
from typing import Any, Optional, Sequence

from .lottery import LotteryRanking, lottery_teams, rank_by_score, rewind_ranking
from .metrics import compare_plans, gold_outcomes, reference_seed_team, rewind_outcomes
from .season import SeasonLog, TeamId, record_as_of, standings

FORMATS = ("text", "csv", "json")


@dataclass
class OutputTable:
    title: str
    columns: list[str]
    rows: list[list[Any]] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def __post_init__(self):
        for row in self.rows:
            if len(row) != len(self.columns):
                raise ValueError(f"row {row!r} does not match columns {self.columns!r}")

    def column(self, name: str) -> list[Any]:
        i = self.columns.index(name)
        return [row[i] for row in self.rows]

    def row_for(self, key_column: str, key: Any) -> dict[str, Any]:
        i = self.columns.index(key_column)
        for row in self.rows:
            if row[i] == key:
                return dict(zip(self.columns, row))
        raise KeyError(key)

    def render(self, fmt: str = "text") -> str:
        if fmt == "text":
            return self._text()
        if fmt == "csv":
            buf = io.StringIO()
            writer = csv.writer(buf, lineterminator="\n")
            writer.writerow(self.columns)
            writer.writerows([[_machine(v) for v in row] for row in self.rows])
            return buf.getvalue()
        if fmt == "json":
            doc = {
                "title": self.title,
                "columns": self.columns,
                "rows": [{c: _machine(v) for c, v in zip(self.columns, row)} for row in self.rows],
                "notes": self.notes,
            }
            return json.dumps(doc, indent=2) + "\n"
        raise ValueError(f"unknown format {fmt!r}")

    def _text(self) -> str:
        cells = [[_human(v) for v in row] for row in self.rows]
        widths = [len(c) for c in self.columns]
        for row in cells:
            widths = [max(w, len(v)) for w, v in zip(widths, row)]
        lines = [self.title, ""]
        lines.append("  ".join(c.rjust(w) for c, w in zip(self.columns, widths)))
        lines.append("  ".join("-" * w for w in widths))
        lines += ["  ".join(v.rjust(w) for v, w in zip(row, widths)) for row in cells]
        if self.notes:
            lines.append("")
            lines += self.notes
        return "\n".join(lines) + "\n"


def _human(v: Any) -> str:
    if v is None:
        return "-"
    if isinstance(v, dt.date):
        return f"{v.month}/{v.day}"
    if isinstance(v, float):
        return "nan" if math.isnan(v) else f"{v:.4f}"
    return str(v)


def _machine(v: Any) -> Any:
    if isinstance(v, dt.date):
        return v.isoformat()
    if isinstance(v, float) and math.isnan(v):
        return None
    return v


def fmt_record(wins: int, losses: int) -> str:
    return f"{wins}-{losses}"


def fmt_change(delta: int) -> str:
    return f"+{delta}" if delta >= 0 else str(delta)


def _target_notes(log: SeasonLog) -> list[str]:
    notes = []
    for conf in log.config.conferences:
        ref = reference_seed_team(log, conf)
        notes.append(
            f"{conf}: seed {log.config.reference_seed} {ref.team} "
            f"{fmt_record(ref.wins, ref.losses)}, REWIND Target {ref.target}"
        )
    return notes


def _tie_notes(ranking: LotteryRanking) -> list[str]:
    groups: dict[int, list[TeamId]] = {}
    for e in ranking:
        if e.tiebreak_applied:
            groups.setdefault(e.score, []).append(e.team)
    return [f"score {s} tie ordered by total losses: {', '.join(ts)}" for s, ts in groups.items()]


def rewind_table(log: SeasonLog, eligibility: Optional[Sequence[TeamId]] = None) -> OutputTable:
    """Lottery teams in pre-lottery order with their REWIND date, wins, score, and rank."""
    teams = list(lottery_teams(log) if eligibility is None else eligibility)
    columns = ["Actual Rank", "Team", "Record", "REWIND Date", "REWIND Wins",
               "REWIND Score", "REWIND Rank", "Rank Change", "REWIND Ranking"]
    table = OutputTable("REWIND results", columns)
    if not teams:
        return table
    outcomes = rewind_outcomes(log)
    ranking = rewind_ranking(outcomes, teams)
    ranked = ranking.teams
    for actual, team in enumerate(teams, 1):
        o = outcomes[team]
        rank = ranking.rank_of(team)
        table.rows.append([
            actual,
            team,
            fmt_record(o.total_wins, o.total_losses),
            o.rewind_date.date if o.rewind_date else None,
            o.rewind_wins if o.eligible else None,
            o.score,
            rank,
            fmt_change(actual - rank),
            ranked[actual - 1],
        ])
    table.notes = _target_notes(log) + _tie_notes(ranking)
    table.notes += [f"{t}: never reached the REWIND Target (ineligible, score 0)"
                    for t in teams if not outcomes[t].eligible]
    return table


def gold_table(log: SeasonLog, eligibility: Optional[Sequence[TeamId]] = None) -> OutputTable:
    teams = list(lottery_teams(log) if eligibility is None else eligibility)
    columns = ["Actual Rank", "Team", "Record", "Gold Date", "Gold Wins", "Gold Score",
               "Gold Rank", "Rank Change", "Gold Ranking"]
    table = OutputTable("Gold Plan results", columns)
    if not teams:
        return table
    outcomes = gold_outcomes(log)
    n = log.config.season_games
    ranking = rank_by_score(
        (t, outcomes[t].score, n - outcomes[t].total_wins) for t in teams
    )
    ranked = ranking.teams
    for actual, team in enumerate(teams, 1):
        o = outcomes[team]
        rank = ranking.rank_of(team)
        table.rows.append([
            actual,
            team,
            fmt_record(o.total_wins, n - o.total_wins),
            o.elimination_date,
            o.wins_at_elimination if o.elimination_date else None,
            o.score,
            rank,
            fmt_change(actual - rank),
            ranked[actual - 1],
        ])
    table.notes = _tie_notes(ranking)
    return table


def compare_table(log: SeasonLog, team: TeamId) -> OutputTable:
    """Current plan, Gold Plan and Ex Post Gold Plan side by side for one team."""
    c = compare_plans(log, team)
    wins, losses = c.rewind.total_wins, c.rewind.total_losses
    n = log.config.season_games
    columns = ["Plan", "Pivot Date", "Record at Pivot", "Relevant Team", "Relevant Record",
               "Reason", "Calculation", "Metric"]
    table = OutputTable(f"Lottery plan comparison for {team} ({fmt_record(wins, losses)})", columns)
    table.rows.append(["Current", "End of Season", fmt_record(wins, losses), None, None,
                       "Definition", str(losses), c.current_metric])

    g = c.gold
    if g.elimination_date is None:
        table.rows.append(["Gold", None, None, None, None, "never eliminated", None, g.score])
    else:
        rw, rl = g.reference_record
        table.rows.append([
            "Gold", g.elimination_date,
            fmt_record(g.wins_at_elimination, g.losses_at_elimination),
            f"{g.reference_team} at pivot", fmt_record(rw, rl),
            f"{g.losses_at_elimination}+{rw} > {n}",
            f"{g.total_wins}-{g.wins_at_elimination}={g.score}", g.score,
        ])

    r = c.rewind
    ref = reference_seed_team(log, log.config.conference_of[team])
    if r.rewind_date is None:
        table.rows.append(["Ex Post Gold", None, None, f"{ref.team} at end of season",
                           fmt_record(ref.wins, ref.losses), "never reached target", None, r.score])
    else:
        w_at, l_at = record_as_of(log, team, r.rewind_date.log_index + 1)
        table.rows.append([
            "Ex Post Gold", r.rewind_date.date, fmt_record(w_at, l_at),
            f"{ref.team} at end of season", fmt_record(ref.wins, ref.losses),
            f"{r.target} > {ref.losses}",
            f"{r.total_wins}-{r.rewind_wins}={r.score}", r.score,
        ])
    return table


def standings_table(log: SeasonLog, cutoff=None) -> OutputTable:
    snap = standings(log, cutoff)
    table = OutputTable("Standings" + (f" through {_machine(cutoff)}" if cutoff is not None else ""),
                        ["Conference", "Seed", "Team", "W", "L", "Tie-break"])
    for conf, order in snap.seeding.items():
        for seed, team in enumerate(order, 1):
            w, l = snap.records[team]
            table.rows.append([conf, seed, team, w, l, "team code" if team in snap.tied else ""])
    if snap.tied:
        table.notes.append("teams level on wins are ordered by team code")
    return table
