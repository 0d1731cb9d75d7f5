import math

import pytest
from hypothesis import strategies as st

from qsworkload.levy_models import Kind, LevyModel

_CRITERIA: list[tuple[str, bool, str]] = []


@pytest.fixture
def criterion():
    """Record one acceptance line: ``criterion(label, passed, detail)``."""

    def record(label: str, passed: bool, detail: str = "") -> bool:
        _CRITERIA.append((label, bool(passed), detail))
        return bool(passed)

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for label, ok, detail in _CRITERIA:
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}")


@pytest.fixture(scope="session")
def brownian():
    return LevyModel.brownian()


@pytest.fixture(scope="session")
def mm1():
    return LevyModel.mm1(1.0, 2.0)


@pytest.fixture(scope="session")
def sn_cp():
    # fill at rate 1, Exp(1) drops at rate 2
    return LevyModel.negative_cp(1.0, 2.0, 1.0)


@st.composite
def stable_models(draw, kinds=tuple(Kind)):
    kind = draw(st.sampled_from(kinds))
    margin = draw(st.floats(0.05, 3.0))
    if kind is Kind.LINEAR_BROWNIAN:
        return LevyModel.brownian(draw(st.floats(0.3, 3.0)), -draw(st.floats(0.1, 3.0)))
    lam = draw(st.floats(0.1, 3.0))
    nu = draw(st.floats(0.5, 4.0))
    if kind is Kind.SPECTRALLY_POSITIVE_CP:
        return LevyModel(kind, -(lam / nu) * (1.0 + margin), 0.0, lam, nu)
    d = draw(st.floats(0.1, 3.0))
    return LevyModel(kind, d, 0.0, d * nu * (1.0 + margin), nu)


def rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


SQRT2 = math.sqrt(2.0)
