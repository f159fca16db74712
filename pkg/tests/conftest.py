import sys
from pathlib import Path

import pytest

# oracles and frozen values are plain modules next to the tests
sys.path.insert(0, str(Path(__file__).parent))

_CRITERIA = []


@pytest.fixture
def criterion():
    """Record one acceptance line; returns the verdict so the caller can assert on it."""

    def record(tag, ok, detail):
        line = f"{tag} {'PASS' if ok else 'FAIL'}: {detail}"
        _CRITERIA.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(_CRITERIA, key=lambda s: (int(s.split()[0][2:].rstrip("abcdefghijklmnopqrstuvwxyz")), s)):
            terminalreporter.write_line(line)
