import json
from pathlib import Path

import pytest

GOLDEN = Path(__file__).parent / "golden" / "published_grids.json"

_ACCEPTANCE: list[tuple[int, str, bool, str]] = []


@pytest.fixture(scope="session")
def published():
    return json.loads(GOLDEN.read_text())


@pytest.fixture
def accept():
    """Record one acceptance criterion result; printed in the terminal summary."""

    def record(number: int, title: str, ok: bool, detail: str = "") -> bool:
        _ACCEPTANCE.append((number, title, bool(ok), detail))
        print(f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} {detail}".rstrip())
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, ok, detail in sorted(_ACCEPTANCE):
        line = f"[{'PASS' if ok else 'FAIL'}] {number:>2}. {title}"
        if detail:
            line += f" ({detail})"
        terminalreporter.write_line(line)
