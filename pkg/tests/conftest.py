import importlib

import pytest

from adaptim import _pykernels
from adaptim.fixtures import dominating_star, oracle_graph, walkthrough_graph

_ACCEPTANCE_LINES: list[str] = []


def _backends():
    out = [_pykernels]
    try:
        out.append(importlib.import_module("adaptim._kernels"))
    except ImportError:
        pass
    return out


BACKENDS = _backends()


@pytest.fixture(params=BACKENDS, ids=lambda k: k.NAME)
def kernel(request):
    return request.param


@pytest.fixture
def g8():
    return oracle_graph()


@pytest.fixture
def star():
    return dominating_star()


@pytest.fixture
def walk():
    return walkthrough_graph()


@pytest.fixture(scope="session")
def acceptance_log():
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
