import time
from contextlib import contextmanager

import pytest

import extkoszul


def pytest_configure(config):
    config.acceptance_lines = []


@pytest.fixture
def criterion(request):
    """Context manager timing one acceptance criterion and logging a pass/fail line."""
    lines = request.config.acceptance_lines

    @contextmanager
    def run(number, title, budget):
        extkoszul.clear_caches()
        start = time.perf_counter()
        ok = False
        try:
            yield
            elapsed = time.perf_counter() - start
            ok = elapsed < budget
            assert ok, f"criterion {number} took {elapsed:.1f}s, budget {budget}s"
        finally:
            elapsed = time.perf_counter() - start
            line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {title}  ({elapsed:.2f}s, budget {budget}s)"
            lines.append((number, line))
            print(line)

    return run


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "acceptance_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        terminalreporter.write_line(f"kernel backend: {extkoszul.BACKEND}")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
