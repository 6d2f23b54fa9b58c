import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion():
    """Record one acceptance criterion: prints a PASS/FAIL line, then asserts every check."""

    def record(number, title, checks, elapsed=None, limit=None):
        checks = dict(checks)
        if limit is not None:
            checks[f"runtime {elapsed:.1f}s < {limit:g}s"] = elapsed < limit
        failed = [name for name, ok in checks.items() if not ok]
        line = f"{'FAIL' if failed else 'PASS'} criterion {number}: {title}"
        if failed:
            line += " [failed: " + "; ".join(failed) + "]"
        _ACCEPTANCE_LINES.append(line)
        print(line)
        assert not failed, line

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
