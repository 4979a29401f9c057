"""Shared fixtures plus the acceptance summary printed after a run."""

from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

ACCEPTANCE_RESULTS: list[tuple[str, str]] = []


def record_criterion(name: str, passed: bool, note: str = "") -> None:
    status = "PASS" if passed else "FAIL"
    ACCEPTANCE_RESULTS.append((name, f"{status}{f' ({note})' if note else ''}"))


def record_skip(name: str, reason: str) -> None:
    ACCEPTANCE_RESULTS.append((name, f"SKIP ({reason})"))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, status in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"{status:<40} {name}")


@pytest.fixture(scope="session")
def reference_backend():
    from spforge.backends import ReferenceBackend

    return ReferenceBackend()
