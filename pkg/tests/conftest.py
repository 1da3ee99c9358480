import re

import pytest

from censpred import CensoredSample, murthy_lifetimes

ACCEPTANCE: dict[str, tuple[bool, str]] = {}


@pytest.fixture(scope="session")
def murthy():
    return CensoredSample(30, 20, murthy_lifetimes()[:20])


@pytest.fixture
def record():
    """Record a pass/fail line for an acceptance criterion."""

    def _record(key: str, passed: bool, detail: str) -> None:
        ACCEPTANCE[key] = (bool(passed), detail)
        print(f"{'PASS' if passed else 'FAIL'} {key}: {detail}")

    return _record


def _natural(key: str):
    return [(0, int(p), "") if p.isdigit() else (1, 0, p) for p in re.split(r"(\d+)", key) if p]


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=_natural):
        passed, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {key}  {detail}")
