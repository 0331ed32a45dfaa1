import numpy as np
import pytest

from survext.distributions import Beta, CkFamily, Exponential, Gompertz, Uniform


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one representative of every family
MODELS = [
    Exponential(1.0),
    Exponential(2.5),
    Uniform(1.0),
    Uniform(3.0),
    Beta(0.5, 1.0),
    Beta(2.0, 5.0),
    Gompertz(5.0, 1.0),
    Gompertz(0.5, 2.0),
    CkFamily(1.5),
    CkFamily(2.0),
]


@pytest.fixture(params=MODELS, ids=repr)
def model(request):
    return request.param


_VERDICTS = []


@pytest.fixture
def verdict(capsys):
    """Record and print one pass/fail line, then assert it."""

    def record(label, ok, detail=""):
        line = f"{'PASS' if ok else 'FAIL'}  {label}" + (f"  [{detail}]" if detail else "")
        _VERDICTS.append(line)
        with capsys.disabled():
            print("\n" + line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in _VERDICTS:
            terminalreporter.write_line(line)
