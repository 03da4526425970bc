from __future__ import annotations

import os

import pytest

# Keep unit tests single-process unless a test asks otherwise.
os.environ.setdefault("QUIVJET_WORKERS", "1")


@pytest.fixture
def tmp_baselines(tmp_path):
    from quivjet.baselines import Baselines

    return Baselines(tmp_path / "baselines.txt")


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
