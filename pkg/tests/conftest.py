import numpy as np
import pytest

from wigner_calc.instances import make_rng


@pytest.fixture
def rng(request) -> np.random.Generator:
    # one stream per test, derived from its name
    return make_rng(20240917, sum(map(ord, request.node.name)))


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(RESULTS.items()):
            terminalreporter.write_line(line)
