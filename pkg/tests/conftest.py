from __future__ import annotations

from pathlib import Path

import pytest

from parafuzzy.engine import default_engine
from parafuzzy.profiles import load_preset

ROOT = Path(__file__).resolve().parents[1]
SCENARIOS = ROOT / "scenarios"


@pytest.fixture(scope="session")
def engine():
    return default_engine()


@pytest.fixture(scope="session")
def scatex():
    return load_preset("scatex-server")


@pytest.fixture(scope="session")
def router1():
    return load_preset("router1-hydro-plant1")


@pytest.fixture(scope="session")
def acu1():
    return load_preset("acu1-hydro-plant1")


@pytest.fixture
def tables_config() -> Path:
    return SCENARIOS / "paper_tables.ini"


@pytest.fixture(autouse=True)
def _no_config_dir(monkeypatch):
    # The default-config lookup must not pick up the developer's environment.
    monkeypatch.delenv("PARAFUZZY_CONFIG_DIR", raising=False)


# One line per acceptance criterion, printed after the run.
ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
