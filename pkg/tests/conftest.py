import pytest

from cameronliebler.clclass import build_bundle
from cameronliebler.gf import build_field


@pytest.fixture(scope="session")
def bundle5():
    return build_bundle(5)


@pytest.fixture(scope="session")
def bundle9():
    return build_bundle(9)


@pytest.fixture(scope="session")
def gf125():
    return build_field(5, 3)


@pytest.fixture(scope="session")
def gf729():
    return build_field(3, 6)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
