from __future__ import annotations

import functools

import pytest

from homeo1.mapcatalog import catalog
from homeo1.projgeom import ResolutionParams
from homeo1.verifier import classify, default_battery


@pytest.fixture(scope="session")
def res() -> ResolutionParams:
    return ResolutionParams()


@pytest.fixture(scope="session")
def battery():
    return default_battery()


@functools.lru_cache(maxsize=None)
def classified(name: str):
    """Reports are deterministic, so share them across test modules."""
    return classify(catalog(name), default_battery(), ResolutionParams())


@pytest.fixture(scope="session")
def report():
    return classified


CRITERIA: dict[int, str] = {}


@pytest.fixture
def record():
    """Store one pass/fail line per acceptance criterion; echoed in the terminal summary."""
    def _record(n: int, ok: bool, detail: str) -> None:
        line = f"criterion {n}: {'PASS' if ok else 'FAIL'} {detail}"
        CRITERIA[n] = line
        print(line)
    return _record


def pytest_terminal_summary(terminalreporter):
    if CRITERIA:
        terminalreporter.section("acceptance criteria")
        for n in sorted(CRITERIA):
            terminalreporter.write_line(CRITERIA[n])
