import datetime as dt
import os
from pathlib import Path

import numpy as np
import pytest

from rewind_lab.season import LeagueConfig
from synth import season_from_results

REPO = Path(__file__).resolve().parent.parent


def nba_data_root():
    env = os.environ.get("REWIND_LAB_DATA_DIR")
    if env and (Path(env) / "nba").is_dir():
        return Path(env) / "nba"
    return REPO / "data" / "nba"


@pytest.fixture
def rng():
    return np.random.default_rng(20240202)


@pytest.fixture
def four_team_config():
    return LeagueConfig({"East": ("A", "B"), "West": ("C", "D")}, season_games=6, reference_seed=1)


@pytest.fixture
def round_robin(four_team_config):
    """Double round robin, hand-written results.

    Final records: A 5-1, B 1-5, C 4-2, D 2-4.
    """
    rows = [
        (0, "A", "B", "A"), (0, "C", "D", "C"),
        (1, "A", "C", "C"), (1, "B", "D", "D"),
        (2, "A", "D", "A"), (2, "B", "C", "C"),
        (3, "B", "A", "A"), (3, "D", "C", "D"),
        (4, "C", "A", "A"), (4, "D", "B", "B"),
        (5, "D", "A", "A"), (5, "C", "B", "C"),
    ]
    return season_from_results(four_team_config, rows)


def day(n):
    return dt.date(2024, 1, 1) + dt.timedelta(days=n)


_criteria = {}


def pytest_runtest_logreport(report):
    name = report.nodeid.split("::")[-1]
    if not name.startswith("test_criterion_"):
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        number = int(name.split("_")[2])
        entry = _criteria.setdefault(number, {"name": name.split("[")[0], "ok": True, "why": []})
        if report.outcome != "passed":
            entry["ok"] = False
            msg = report.longreprtext.strip().splitlines()
            entry["why"].append(next((m for m in reversed(msg) if m.startswith("E ")), msg[-1] if msg else "")[:160])


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        c = _criteria[number]
        line = f"criterion {number}: {'PASS' if c['ok'] else 'FAIL'} ({c['name']})"
        if c["why"]:
            line += ": " + c["why"][0].lstrip("E ").strip()
        terminalreporter.write_line(line)
