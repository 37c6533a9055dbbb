import pytest

from cyclelab import full_wage_led, goodwin, integrate, minsky, minsky_reserve_army

REFERENCE = dict(p=2.0, r=5.0, c=1.5)
APPENDIX_X0 = (0.5, 1.0, 0.75)


@pytest.fixture(scope="session")
def goodwin_orbit():
    return integrate(goodwin(1, 1), (0.6, 0.5), 40.0)


@pytest.fixture(scope="session")
def minsky_orbit():
    return integrate(minsky(1), (0.6, 0.0, 0.5), 40.0)


@pytest.fixture(scope="session")
def appendix_orbits():
    return {s: integrate(full_wage_led(s=s, **REFERENCE), APPENDIX_X0, 200.0) for s in (0.0, 0.03, -0.01)}


@pytest.fixture(scope="session")
def fig8_orbit():
    return integrate(full_wage_led(1, 1, 1, 1), (0.6, 0.4, 0.5), 40.0)


@pytest.fixture(scope="session")
def fig5b_orbit():
    return integrate(minsky_reserve_army(**REFERENCE), (0.6, 0.4, 0.5), 200.0)


_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion():
    """Record one acceptance line: ``criterion(n, ok, detail)``."""

    def record(number: int, ok: bool, detail: str) -> bool:
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        print(line)
        _ACCEPTANCE_LINES.append(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
