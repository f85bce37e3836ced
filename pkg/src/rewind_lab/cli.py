"""rewind-lab: draft-lottery orderings under the current, Gold and Ex Post Gold plans.

Usage:
    rewind-lab --config league.yaml --log games.csv rewind
    rewind-lab --config league.yaml --log games.csv compare POR
    rewind-lab --config league.yaml --log games.csv simulate --as-of 2024-01-28 --team POR
    rewind-lab --config league.yaml --log games.csv lottery --draws 100000

Paths that do not exist relative to the working directory are looked up in
$REWIND_LAB_DATA_DIR, which also supplies the defaults league.yaml and games.csv.

Exit codes: 0 success, 1 data or computation error, 2 usage error.
"""

from __future__ import annotations

import argparse
import datetime as dt
import sys
import warnings
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import ingest
from .lottery import (
    LotteryError,
    OddsTable,
    hybrid_draft_order,
    lottery_teams,
    pick_frequencies,
    rewind_ranking,
)
from .metrics import rewind_outcomes
from .report import (
    FORMATS,
    OutputTable,
    compare_table,
    fmt_record,
    gold_table,
    rewind_table,
    standings_table,
)
from .season import SeasonError, SeasonLog, record_as_of
from .strategy import (
    MidSeasonState,
    StrengthModel,
    classify_phase,
    expected_score_delta,
    fit_strengths,
    simulate_completions,
)

DEFAULT_CONFIG = "league.yaml"
DEFAULT_LOG = "games.csv"
DEFAULT_REPLICAS = 10_000


def _resolve(path: Optional[str], default: str) -> Path:
    p = Path(path or default)
    if p.exists() or p.is_absolute():
        return p
    return ingest.data_dir() / p


def load_season(config_path: Optional[str], log_path: Optional[str]) -> SeasonLog:
    """Load a season from a CSV log plus config, or from a snapshot file."""
    log_file = _resolve(log_path, DEFAULT_LOG)
    with open(log_file, "rb") as fh:
        is_snapshot = fh.read(len(ingest.SNAPSHOT_MAGIC)) == ingest.SNAPSHOT_MAGIC
    if is_snapshot:
        return ingest.read_season_snapshot(log_file)
    config = ingest.load_config(_resolve(config_path, DEFAULT_CONFIG))
    return ingest.load_game_log(log_file, config)


def cmd_ingest(log: SeasonLog, out: Optional[str] = None) -> OutputTable:
    if out:
        ingest.write_season_snapshot(log, out)
    played = log.games_played()
    table = OutputTable("Ingested season", ["Quantity", "Value"])
    table.rows += [
        ["teams", len(played)],
        ["games", len(log.games)],
        ["first date", log.games[0].date if log.games else None],
        ["last date", log.games[-1].date if log.games else None],
        ["complete", "yes" if log.is_complete else "no"],
    ]
    for team, short in sorted(log.shortfall().items()):
        table.notes.append(f"{team}: {played[team]} of {log.config.season_games} games")
    if out:
        table.notes.append(f"snapshot written to {out}")
    return table


def cmd_standings(log: SeasonLog, as_of: Optional[dt.date] = None) -> OutputTable:
    return standings_table(log, as_of)


def cmd_rewind(log: SeasonLog) -> OutputTable:
    log.require_complete()
    return rewind_table(log)


def cmd_gold(log: SeasonLog) -> OutputTable:
    log.require_complete()
    return gold_table(log)


def cmd_compare(log: SeasonLog, team: str) -> OutputTable:
    log.config.check_team(team)
    return compare_table(log, team)


def cmd_simulate(
    log: SeasonLog,
    as_of: dt.date,
    team: str,
    replicas: int = DEFAULT_REPLICAS,
    seed: Optional[int] = None,
) -> OutputTable:
    log.config.check_team(team)
    if log.games and as_of > log.games[-1].date:
        raise SeasonError(f"--as-of {as_of} is after the last game ({log.games[-1].date})")
    state = MidSeasonState.from_log(log, as_of)
    played = state.played
    if log.config.strengths:
        model, source = StrengthModel.from_config(log.config), "config"
    else:
        model, source = fit_strengths(played), "fitted to games played"
    seed = 0 if seed is None else seed
    dist = simulate_completions(state, model, replicas, seed)

    wins, losses = record_as_of(played, team, as_of)
    conf = log.config.conference_of[team]
    table = OutputTable(f"Season simulation for {team} as of {as_of.isoformat()}", ["Quantity", "Value"])
    table.rows += [
        ["record", fmt_record(wins, losses)],
        ["phase", classify_phase(losses, log.config.historical_target_bounds).value],
        ["replicas", replicas],
        ["seed", seed],
        [f"{conf} target mean", dist.target_mean(conf)],
    ]
    for q in (0.05, 0.5, 0.95):
        table.rows.append([f"{conf} target q{int(q * 100):02d}", dist.target_quantile(conf, q)])
    for target, p in dist.target_probs[conf].items():
        table.rows.append([f"P(target = {target})", p])
    table.rows.append(["expected REWIND score", dist.mean_score(team)])
    if state.next_game(team) is None:
        table.rows += [["next game", None], ["score delta (win - loss)", None], ["std error", None]]
    else:
        delta = expected_score_delta(state, team, model, replicas, seed)
        g = delta.game
        table.rows += [
            ["next game", f"{g.date.isoformat()} {g.away}@{g.home}"],
            ["score delta (win - loss)", delta.estimate],
            ["std error", delta.stderr],
        ]
    table.notes.append(f"strengths {source}; home advantage {model.home_advantage}")
    return table


def cmd_lottery(
    log: SeasonLog, odds: Optional[OddsTable] = None, seed: Optional[int] = None, draws: int = 1
) -> OutputTable:
    log.require_complete()
    if odds is None:
        if log.config.lottery_odds is None:
            raise LotteryError("no lottery odds: pass --odds or set lottery_odds in the config")
        odds = OddsTable(log.config.lottery_odds)
    ranking = rewind_ranking(rewind_outcomes(log), lottery_teams(log))
    if not len(ranking):
        return OutputTable("Draft lottery", ["Pick", "Team", "REWIND Rank", "REWIND Score", "Losses"])
    odds.check_size(len(ranking))
    seed = 0 if seed is None else seed
    by_team = {e.team: e for e in ranking}
    if draws <= 1:
        order = hybrid_draft_order(ranking, odds, seed)
        table = OutputTable("Draft lottery", ["Pick", "Team", "REWIND Rank", "REWIND Score", "Losses", "Via"])
        for pick, team in enumerate(order, 1):
            e = by_team[team]
            table.rows.append([pick, team, e.rank, e.score, e.total_losses, "draw" if pick <= 4 else "losses"])
        table.notes.append(f"seed {seed}")
        return table
    freqs = pick_frequencies(ranking, odds, draws, seed)
    cols = ["REWIND Rank", "Team", "REWIND Score", "Losses", "Odds", "P(pick 1)", "P(top 4)", "Mean Pick"]
    table = OutputTable(f"Draft lottery over {draws} draws", cols)
    slots = np.arange(1, len(ranking) + 1)
    for e, p in zip(ranking, odds.weights):
        f = freqs[e.team]
        table.rows.append([e.rank, e.team, e.score, e.total_losses, p,
                           float(f[0]), float(f[:4].sum()), float((f * slots).sum())])
    table.notes.append(f"seed {seed}")
    return table


def _date(text: str) -> dt.date:
    try:
        return dt.date.fromisoformat(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected YYYY-MM-DD, got {text!r}") from None


def _add_globals(parser: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--config", default=d(None), help=f"league config (default {DEFAULT_CONFIG})")
    parser.add_argument("--log", default=d(None), help=f"game log CSV or snapshot (default {DEFAULT_LOG})")
    parser.add_argument("--format", choices=FORMATS, default=d("text"))
    parser.add_argument("--seed", type=int, default=d(None), help="random seed (default 0)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rewind-lab", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter
    )
    _add_globals(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="validate inputs and optionally write a snapshot")
    p.add_argument("--out", help="snapshot path to write")
    p = sub.add_parser("standings", help="conference standings")
    p.add_argument("--as-of", type=_date)
    sub.add_parser("rewind", help="REWIND table for the lottery teams")
    sub.add_parser("gold", help="Gold Plan table for the lottery teams")
    p = sub.add_parser("compare", help="compare the three plans for one team")
    p.add_argument("team")
    p = sub.add_parser("simulate", help="Monte Carlo over the rest of the season")
    p.add_argument("--as-of", type=_date, required=True)
    p.add_argument("--team", required=True)
    p.add_argument("--replicas", type=int, default=DEFAULT_REPLICAS)
    p = sub.add_parser("lottery", help="REWIND ranking plus hybrid draft order")
    p.add_argument("--odds", type=OddsTable.parse, help="comma-separated odds by REWIND rank")
    p.add_argument("--draws", type=int, default=1)
    for name, subparser in sub.choices.items():
        _add_globals(subparser, suppress=True)
    return parser


def run(args: argparse.Namespace) -> OutputTable:
    with warnings.catch_warnings():
        warnings.simplefilter("always", ingest.UnsortedLogWarning)
        with warnings.catch_warnings(record=True) as caught:
            log = load_season(args.config, args.log)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    if args.command == "ingest":
        return cmd_ingest(log, args.out)
    if args.command == "standings":
        return cmd_standings(log, args.as_of)
    if args.command == "rewind":
        return cmd_rewind(log)
    if args.command == "gold":
        return cmd_gold(log)
    if args.command == "compare":
        return cmd_compare(log, args.team)
    if args.command == "simulate":
        if args.replicas < 1:
            raise SeasonError("--replicas must be positive")
        return cmd_simulate(log, args.as_of, args.team, args.replicas, args.seed)
    if args.command == "lottery":
        return cmd_lottery(log, args.odds, args.seed, args.draws)
    raise AssertionError(args.command)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        table = run(args)
    except (SeasonError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return 1
    sys.stdout.write(table.render(args.format))
    return 0


if __name__ == "__main__":
    sys.exit(main())
