import pytest

from hmfslopes.presets import Setting


@pytest.fixture(scope="session")
def s13():
    return Setting.preset("sqrt13-p3")


@pytest.fixture(scope="session")
def s17():
    return Setting.preset("sqrt17-p2")


@pytest.fixture(scope="session")
def s5():
    return Setting.preset("sqrt5-p2")


ACCEPTANCE = {}


def record(n, ok, detail=""):
    """Remember the outcome of acceptance criterion n and echo it."""
    line = "criterion %2d: %s  %s" % (n, "PASS" if ok else "FAIL", detail)
    ACCEPTANCE[n] = line
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n])
