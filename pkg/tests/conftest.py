import numpy as np
import pytest

from fracgrad import _backend


@pytest.fixture(params=sorted(_backend.BACKENDS))
def backend(request):
    prev = _backend.active()
    _backend.use(request.param)
    yield request.param
    _backend.use(prev)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


ACCEPTANCE = []


@pytest.fixture
def accept():
    """Record one acceptance line, then assert it."""

    def record(num, name, ok, detail):
        ACCEPTANCE.append(f"[{'PASS' if ok else 'FAIL'}] C{num} {name}: {detail}")
        assert ok, detail

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[1][1:])):
            terminalreporter.write_line(line)
