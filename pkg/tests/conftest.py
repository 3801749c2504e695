import json
import time
from contextlib import contextmanager
from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"

_criteria_key = pytest.StashKey[list]()


def load_fixture(name):
    return json.loads((FIXTURES / name).read_text(encoding="utf-8"))


def pytest_configure(config):
    config.stash[_criteria_key] = []


@pytest.fixture
def criterion(request):
    """Context manager recording one PASS/FAIL line per acceptance criterion."""
    lines = request.config.stash[_criteria_key]

    @contextmanager
    def run(number, title, limit_s=None):
        notes = []
        t0 = time.perf_counter()
        try:
            yield notes
        except BaseException as exc:
            elapsed = time.perf_counter() - t0
            lines.append((number, f"FAIL  criterion {number:>2}: {title} ({elapsed:.2f}s) {type(exc).__name__}: {exc}"))
            raise
        elapsed = time.perf_counter() - t0
        if limit_s is not None and elapsed > limit_s:
            lines.append((number, f"FAIL  criterion {number:>2}: {title} ({elapsed:.2f}s > {limit_s}s limit)"))
            raise AssertionError(f"criterion {number} took {elapsed:.2f}s, limit {limit_s}s")
        extra = f" [{'; '.join(notes)}]" if notes else ""
        lines.append((number, f"PASS  criterion {number:>2}: {title} ({elapsed:.2f}s){extra}"))

    return run


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_criteria_key, [])
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(lines, key=lambda t: t[0]):
        terminalreporter.write_line(line)
