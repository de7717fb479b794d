from __future__ import annotations

import pytest

# Acceptance criterion results collected here and printed as one line each
# in the terminal summary, so the pass/fail roster survives output capture.
_CRITERIA: list[tuple[int, str, bool, str]] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num, name, ok, detail in sorted(_CRITERIA):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {num:2d}: {name}"
        if detail:
            line += f" -- {detail}"
        terminalreporter.write_line(line)


@pytest.fixture
def criterion():
    """Run one acceptance check and record its summary line.

    Usage: criterion(num, name, fn) where fn returns (ok, detail).
    A raised exception records a FAIL line before propagating.
    """

    def run(num: int, name: str, fn):
        try:
            ok, detail = fn()
        except Exception as e:
            _CRITERIA.append((num, name, False, f"error: {e}"))
            raise
        _CRITERIA.append((num, name, bool(ok), detail))
        assert ok, f"criterion {num} ({name}): {detail}"

    return run
