import numpy as np
import pytest

from a2glos import _pykernels
from a2glos.scenario import ScenarioPreset

try:
    from a2glos import _kernels
except ImportError:  # extension not built
    _kernels = None

BACKENDS = [pytest.param(_pykernels, id="python")]
if _kernels is not None:
    BACKENDS.append(pytest.param(_kernels, id="compiled"))


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def suburban():
    return ScenarioPreset.SUBURBAN.scenario()


@pytest.fixture
def urban():
    return ScenarioPreset.URBAN.scenario()


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[key])
