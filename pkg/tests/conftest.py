from pathlib import Path

import pytest

from rcdesign.core import parse_array

DATA = Path(__file__).parent / "data"

_acceptance_lines: list[tuple[str, bool, str]] = []


def record_criterion(name: str, passed: bool, detail: str = ""):
    _acceptance_lines.append((name, passed, detail))


def pytest_terminal_summary(terminalreporter, exitstatus):
    if not _acceptance_lines:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in _acceptance_lines:
        status = "PASS" if passed else "FAIL"
        line = f"{status}  {name}"
        if detail:
            line += f"  ({detail})"
        terminalreporter.write_line(line)


def _load(name: str):
    arr, _ = parse_array((DATA / name).read_text())
    return arr


@pytest.fixture(scope="session")
def fig1a():
    return _load("fig1a.txt")


@pytest.fixture(scope="session")
def fig1b():
    return _load("fig1b.txt")


@pytest.fixture(scope="session")
def fig1c():
    return _load("fig1c.txt")


@pytest.fixture(scope="session")
def fig2():
    return _load("fig2.txt")


@pytest.fixture(scope="session")
def fig3():
    return _load("fig3.txt")
