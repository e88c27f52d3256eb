import numpy as np
import pytest

from ordlasso import _backend, descent


@pytest.fixture(params=_backend.available_backends())
def backend(request):
    """Run the test once per available kernel backend."""
    with _backend.use_backend(request.param):
        yield request.param


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(autouse=True)
def _strict_descent():
    # every solver call in the suite runs with the monotone-progress assertion on
    assert descent._strict, "descent monitor left in lenient mode"
    yield


# acceptance verdicts, echoed in the terminal summary so they survive capture
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("-", "acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
    stats = descent.stats()
    if not stats:
        return
    terminalreporter.write_sep("-", "descent monitor")
    for kind, s in sorted(stats.items()):
        terminalreporter.write_line(
            f"{kind:24s} checks={s['checks']:>9d} violations={s['violations']} "
            f"worst={s['worst']:.2e}")
