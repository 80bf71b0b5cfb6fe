import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from tracelab import kernels  # noqa: E402
from tracelab.core import Weight  # noqa: E402


def _backends():
    names = ["numpy"]
    try:
        kernels.get_backend("cython")
        names.append("cython")
    except ImportError:
        pass
    return names


BACKENDS = _backends()


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def logw():
    return Weight.make("log_one_plus_sq")


@pytest.fixture
def korenblum():
    return Weight.make("korenblum")


_ACCEPTANCE: list = []


@pytest.fixture
def criterion():
    """Record one pass/fail line for an acceptance criterion."""

    def record(num: int, title: str, ok: bool, detail: str = "") -> bool:
        line = f"criterion {num}: {'PASS' if ok else 'FAIL'}  {title}" + (f"  [{detail}]" if detail else "")
        print(line)
        _ACCEPTANCE.append((num, line))
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_ACCEPTANCE):
            terminalreporter.write_line(line)
