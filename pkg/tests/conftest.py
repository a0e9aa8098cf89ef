import pytest

from convsym.geometry import build_grid, make_rng

# criterion id -> list of (test outcome, detail lines)
ACCEPTANCE: dict = {}
DETAILS: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion covered by the test")


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    cid = marker.args[0]
    if call.when == "call" or (call.when == "setup" and call.excinfo is not None):
        ACCEPTANCE.setdefault(cid, []).append(call.excinfo is None)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for cid in sorted(ACCEPTANCE):
        status = "PASS" if all(ACCEPTANCE[cid]) else "FAIL"
        tr.write_line(f"criterion {cid:>2}: {status}")
        for line in DETAILS.get(cid, []):
            tr.write_line(f"    {line}")


@pytest.fixture
def detail(request):
    """Record a detail line printed under the test's criterion."""
    marker = request.node.get_closest_marker("criterion")
    cid = marker.args[0] if marker else None

    def add(line):
        DETAILS.setdefault(cid, []).append(str(line))

    return add


@pytest.fixture(scope="session")
def grids():
    """Default grids for n = 2, 3, 4 and a Monte Carlo grid for n = 5."""
    return {n: build_grid(n) for n in (2, 3, 4, 5)}


@pytest.fixture
def rng():
    return make_rng(12345)
