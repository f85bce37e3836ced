"""Read league configs and game-log CSVs; persist season snapshots."""

from __future__ import annotations

import csv
import datetime as dt
import io
import json
import os
import warnings
from pathlib import Path
from typing import Union

import yaml

from .season import GameResult, LeagueConfig, SeasonError, SeasonLog

LOG_COLUMNS = ("date", "home", "away", "home_score", "away_score")

SNAPSHOT_MAGIC = b"REWINDLAB-SNAPSHOT"
SNAPSHOT_VERSION = 1

DATA_DIR_ENV = "REWIND_LAB_DATA_DIR"


class IngestError(SeasonError):
    pass


class UnsortedLogWarning(UserWarning):
    pass


_CONFIG_KEYS = {
    "conferences",
    "season_games",
    "reference_seed",
    "historical_target_bounds",
    "lottery_teams",
    "lottery_size",
    "lottery_odds",
    "strengths",
    "home_advantage",
}


def parse_league_config(text: str) -> LeagueConfig:
    """Parse a YAML (or JSON) league config document."""
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise IngestError(f"config is not valid YAML: {exc}") from exc
    if not isinstance(doc, dict):
        raise IngestError("config must be a mapping")
    unknown = set(doc) - _CONFIG_KEYS
    if unknown:
        raise IngestError(f"unknown config keys: {', '.join(sorted(unknown))}")
    conferences = doc.get("conferences")
    if not isinstance(conferences, dict) or not conferences:
        raise IngestError("config needs a 'conferences' mapping of name -> team codes")
    for name, teams in conferences.items():
        if not isinstance(teams, list):
            raise IngestError(f"conference {name!r} must list team codes")
        _check_codes(teams, f"conference {name!r}")

    kwargs = {"conferences": {str(k): tuple(v) for k, v in conferences.items()}}
    for key in ("season_games", "reference_seed", "lottery_size"):
        if key in doc:
            kwargs[key] = _as_int(doc[key], key)
    if "historical_target_bounds" in doc:
        bounds = doc["historical_target_bounds"]
        if not isinstance(bounds, (list, tuple)) or len(bounds) != 2:
            raise IngestError("historical_target_bounds must be two integers")
        kwargs["historical_target_bounds"] = tuple(_as_int(b, "historical_target_bounds") for b in bounds)
    if doc.get("lottery_teams") is not None:
        _check_codes(doc["lottery_teams"], "lottery_teams")
        kwargs["lottery_teams"] = tuple(doc["lottery_teams"])
    if doc.get("lottery_odds") is not None:
        kwargs["lottery_odds"] = tuple(_as_float(p, "lottery_odds") for p in doc["lottery_odds"])
    if doc.get("strengths"):
        kwargs["strengths"] = {str(t): _as_float(s, "strengths") for t, s in doc["strengths"].items()}
    if "home_advantage" in doc:
        kwargs["home_advantage"] = _as_float(doc["home_advantage"], "home_advantage")
    try:
        return LeagueConfig(**kwargs)
    except SeasonError as exc:
        raise IngestError(str(exc)) from exc


def _check_codes(codes, where: str) -> None:
    # YAML turns bare NO/ON/YES into booleans; quote such codes
    if not isinstance(codes, list):
        raise IngestError(f"{where} must be a list of team codes")
    for code in codes:
        if not isinstance(code, str):
            raise IngestError(f"{where}: team code {code!r} must be a string")


def _as_int(value, key: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise IngestError(f"{key} must be an integer, got {value!r}")
    return value


def _as_float(value, key: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise IngestError(f"{key} must be a number, got {value!r}")
    return float(value)


def parse_game_log(text: str, config: LeagueConfig) -> SeasonLog:
    """Parse ``date,home,away,home_score,away_score`` CSV text into a SeasonLog.

    Out-of-order dates are stably sorted with an ``UnsortedLogWarning``.
    """
    if text.startswith("\ufeff"):
        text = text[1:]
    if not text.strip():
        return SeasonLog(config, ())
    reader = csv.reader(io.StringIO(text, newline=""))
    header = [h.strip() for h in next(reader)]
    if tuple(header) != LOG_COLUMNS:
        raise IngestError(f"line 1: expected header {','.join(LOG_COLUMNS)}, got {','.join(header)}")
    known = config.conference_of
    games = []
    for row in reader:
        line = reader.line_num
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(LOG_COLUMNS):
            raise IngestError(f"line {line}: expected {len(LOG_COLUMNS)} fields, got {len(row)}")
        date_s, home, away, hs, as_ = (c.strip() for c in row)
        try:
            date = dt.date.fromisoformat(date_s)
        except ValueError:
            raise IngestError(f"line {line}: bad date {date_s!r}") from None
        try:
            home_score, away_score = int(hs), int(as_)
        except ValueError:
            raise IngestError(f"line {line}: scores must be integers") from None
        if home_score < 0 or away_score < 0:
            raise IngestError(f"line {line}: negative score")
        if home_score == away_score:
            raise IngestError(f"line {line}: tied score {home_score}-{away_score}")
        for team in (home, away):
            if team not in known:
                raise IngestError(f"line {line}: unknown team {team!r}")
        if home == away:
            raise IngestError(f"line {line}: {home} cannot play itself")
        winner = home if home_score > away_score else away
        games.append(GameResult(date, home, away, winner, home_score, away_score))

    if any(b.date < a.date for a, b in zip(games, games[1:])):
        warnings.warn("game log dates are not in order; sorting by date", UnsortedLogWarning, stacklevel=2)
        games.sort(key=lambda g: g.date)
    return SeasonLog(config, tuple(games))


def format_game_log(log: SeasonLog) -> str:
    """Inverse of :func:`parse_game_log` for logs that carry scores."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(LOG_COLUMNS)
    for g in log.games:
        if g.home_score is None or g.away_score is None:
            hs, as_ = (1, 0) if g.winner == g.home else (0, 1)
        else:
            hs, as_ = g.home_score, g.away_score
        writer.writerow([g.date.isoformat(), g.home, g.away, hs, as_])
    return buf.getvalue()


def load_config(path: Union[str, os.PathLike]) -> LeagueConfig:
    return parse_league_config(Path(path).read_text(encoding="utf-8"))


def load_game_log(path: Union[str, os.PathLike], config: LeagueConfig) -> SeasonLog:
    return parse_game_log(Path(path).read_text(encoding="utf-8"), config)


def _config_to_dict(config: LeagueConfig) -> dict:
    return {
        "conferences": {k: list(v) for k, v in config.conferences.items()},
        "season_games": config.season_games,
        "reference_seed": config.reference_seed,
        "historical_target_bounds": list(config.historical_target_bounds),
        "lottery_teams": None if config.lottery_teams is None else list(config.lottery_teams),
        "lottery_size": config.lottery_size,
        "lottery_odds": None if config.lottery_odds is None else list(config.lottery_odds),
        "strengths": dict(config.strengths),
        "home_advantage": config.home_advantage,
    }


def write_season_snapshot(log: SeasonLog, path: Union[str, os.PathLike]) -> None:
    """Write a versioned snapshot: a magic/version header line followed by JSON."""
    body = {
        "config": _config_to_dict(log.config),
        "games": [
            [g.date.isoformat(), g.home, g.away, g.winner, g.home_score, g.away_score]
            for g in log.games
        ],
    }
    header = SNAPSHOT_MAGIC + b" %d\n" % SNAPSHOT_VERSION
    Path(path).write_bytes(header + json.dumps(body, separators=(",", ":")).encode("utf-8"))


def read_season_snapshot(path: Union[str, os.PathLike]) -> SeasonLog:
    raw = Path(path).read_bytes()
    head, _, payload = raw.partition(b"\n")
    magic, _, version = head.partition(b" ")
    if magic != SNAPSHOT_MAGIC:
        raise IngestError(f"{path}: not a season snapshot")
    try:
        version_no = int(version)
    except ValueError:
        raise IngestError(f"{path}: corrupt snapshot header") from None
    if version_no != SNAPSHOT_VERSION:
        raise IngestError(f"{path}: snapshot version {version_no}, expected {SNAPSHOT_VERSION}")
    try:
        body = json.loads(payload)
        cfg = body["config"]
        config = LeagueConfig(
            conferences={k: tuple(v) for k, v in cfg["conferences"].items()},
            season_games=cfg["season_games"],
            reference_seed=cfg["reference_seed"],
            historical_target_bounds=tuple(cfg["historical_target_bounds"]),
            lottery_teams=None if cfg["lottery_teams"] is None else tuple(cfg["lottery_teams"]),
            lottery_size=cfg["lottery_size"],
            lottery_odds=None if cfg["lottery_odds"] is None else tuple(cfg["lottery_odds"]),
            strengths=cfg["strengths"],
            home_advantage=cfg["home_advantage"],
        )
        games = tuple(
            GameResult(dt.date.fromisoformat(d), h, a, w, hs, as_)
            for d, h, a, w, hs, as_ in body["games"]
        )
    except (ValueError, KeyError, TypeError) as exc:
        raise IngestError(f"{path}: corrupt snapshot ({exc})") from exc
    return SeasonLog(config, games)


def data_dir() -> Path:
    return Path(os.environ.get(DATA_DIR_ENV, "."))
