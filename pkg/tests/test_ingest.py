import datetime as dt

import pytest

from oracle import bf_record
from rewind_lab.ingest import (
    IngestError,
    UnsortedLogWarning,
    format_game_log,
    parse_game_log,
    parse_league_config,
    read_season_snapshot,
    write_season_snapshot,
)
from rewind_lab.report import rewind_table
from synth import random_season

NBA_LIKE = """
conferences:
  East: [ATL, BOS, BRK, CHI, CHO, CLE, DET, IND, MIA, MIL, NYK, ORL, PHI, TOR, WAS]
  West: [DAL, DEN, GSW, HOU, LAC, LAL, MEM, MIN, NOP, OKC, PHO, POR, SAC, SAS, UTA]
"""

TINY = """
season_games: 6
reference_seed: 1
conferences:
  East: [A, B]
  West: [C, D]
"""

TINY_LOG = """date,home,away,home_score,away_score
2024-01-01,A,B,101,99
2024-01-01,C,D,90,85
2024-01-02,A,C,88,95
2024-01-02,B,D,70,80
2024-01-03,A,D,110,100
2024-01-03,B,C,99,100
2024-01-04,B,A,90,91
2024-01-04,D,C,104,103
2024-01-05,C,A,77,78
2024-01-05,D,B,80,81
2024-01-06,D,A,60,61
2024-01-06,C,B,100,80
"""


def test_config_defaults():
    config = parse_league_config(NBA_LIKE)
    assert config.season_games == 82
    assert config.reference_seed == 6
    assert config.historical_target_bounds == (29, 42)
    assert len(config.teams) == 30
    assert config.lottery_teams is None


def test_config_reference_seed_ten():
    config = parse_league_config(NBA_LIKE + "reference_seed: 10\n")
    assert config.reference_seed == 10


@pytest.mark.parametrize("text", [
    "conferences:\n  East: [A, B]\n  West: [B, C]\n",
    "conferences:\n  East: [A, A]\nreference_seed: 1\n",
    "conferences:\n  East: [A, B]\nreference_seed: 3\n",
    "conferences:\n  East: [A, NO]\nreference_seed: 1\n",
    "conferences: []\n",
    "season_games: 82\n",
    "conferences:\n  East: [A, B]\nreference_seed: 1\nbogus: 1\n",
    "conferences:\n  East: [A, B]\nreference_seed: six\n",
    "conferences:\n  East: [A, B]\nreference_seed: 1\nhistorical_target_bounds: [3]\n",
    "[not, a, mapping]",
])
def test_config_errors(text):
    with pytest.raises(IngestError):
        parse_league_config(text)


def test_config_json_is_accepted():
    config = parse_league_config('{"conferences": {"X": ["A", "B"]}, "reference_seed": 2, "season_games": 4}')
    assert config.reference_seed == 2


def test_parse_tiny_log_matches_hand_tally():
    config = parse_league_config(TINY)
    log = parse_game_log(TINY_LOG, config)
    assert len(log.games) == 12
    assert log.is_complete
    expected = {"A": (5, 1), "B": (1, 5), "C": (4, 2), "D": (2, 4)}
    for team, rec in expected.items():
        assert log.final_record(team) == rec
        assert bf_record(log, team) == rec


def test_winner_is_higher_score():
    log = parse_game_log(TINY_LOG, parse_league_config(TINY))
    for g in log.games:
        assert g.winner == (g.home if g.home_score > g.away_score else g.away)


def test_crlf_and_bom():
    config = parse_league_config(TINY)
    text = "\ufeff" + TINY_LOG.replace("\n", "\r\n")
    assert parse_game_log(text, config) == parse_game_log(TINY_LOG, config)


def test_empty_file_is_empty_log():
    log = parse_game_log("", parse_league_config(TINY))
    assert log.games == ()
    header_only = parse_game_log("date,home,away,home_score,away_score\n", parse_league_config(TINY))
    assert header_only.games == ()


@pytest.mark.parametrize("row,fragment", [
    ("2024-01-07,A,B,100,100", "line 2: tied"),
    ("2024-01-07,A,Z,100,90", "line 2: unknown team"),
    ("2024-01-07,A,B,100", "line 2: expected 5 fields"),
    ("01/07/2024,A,B,100,90", "line 2: bad date"),
    ("2024-01-07,A,B,x,90", "line 2: scores"),
    ("2024-01-07,A,A,100,90", "line 2:"),
])
def test_bad_rows(row, fragment):
    text = "date,home,away,home_score,away_score\n" + row + "\n"
    with pytest.raises(IngestError, match=fragment):
        parse_game_log(text, parse_league_config(TINY))


def test_bad_header():
    with pytest.raises(IngestError, match="header"):
        parse_game_log("day,home,away,hs,as\n", parse_league_config(TINY))


def test_out_of_order_dates_warn_and_sort_stably():
    lines = TINY_LOG.strip().splitlines()
    shuffled = "\n".join([lines[0]] + lines[3:] + lines[1:3]) + "\n"
    with pytest.warns(UnsortedLogWarning):
        log = parse_game_log(shuffled, parse_league_config(TINY))
    dates = [g.date for g in log.games]
    assert dates == sorted(dates)
    # the two 2024-01-01 rows keep their relative order
    assert [(g.home, g.away) for g in log.games[:2]] == [("A", "B"), ("C", "D")]


def test_format_parse_round_trip(rng):
    for _ in range(20):
        log = random_season(rng)
        assert parse_game_log(format_game_log(log), log.config) == log


def test_snapshot_round_trip(tmp_path, rng):
    log = random_season(rng)
    path = tmp_path / "season.snap"
    write_season_snapshot(log, path)
    assert path.read_bytes().startswith(b"REWINDLAB-SNAPSHOT 1\n")
    assert read_season_snapshot(path) == log


def test_snapshot_reproduces_rewind_table(tmp_path, rng):
    log = random_season(rng, n_teams=10, games=20, n_conf=2)
    path = tmp_path / "season.snap"
    write_season_snapshot(log, path)
    again = read_season_snapshot(path)
    assert rewind_table(again).rows == rewind_table(log).rows


def test_snapshot_errors(tmp_path, rng):
    log = random_season(rng)
    path = tmp_path / "season.snap"
    write_season_snapshot(log, path)
    raw = path.read_bytes()

    wrong_version = tmp_path / "v2.snap"
    wrong_version.write_bytes(raw.replace(b"SNAPSHOT 1", b"SNAPSHOT 2", 1))
    with pytest.raises(IngestError, match="version"):
        read_season_snapshot(wrong_version)

    corrupt = tmp_path / "corrupt.snap"
    corrupt.write_bytes(raw[: len(raw) // 2])
    with pytest.raises(IngestError, match="corrupt"):
        read_season_snapshot(corrupt)

    not_snapshot = tmp_path / "games.csv"
    not_snapshot.write_text(TINY_LOG)
    with pytest.raises(IngestError):
        read_season_snapshot(not_snapshot)

    with pytest.raises(OSError):
        read_season_snapshot(tmp_path / "missing.snap")


def test_snapshot_keeps_scores(tmp_path):
    log = parse_game_log(TINY_LOG, parse_league_config(TINY))
    path = tmp_path / "s.snap"
    write_season_snapshot(log, path)
    again = read_season_snapshot(path)
    assert again.games[0].home_score == 101
    assert again.games[0].date == dt.date(2024, 1, 1)
