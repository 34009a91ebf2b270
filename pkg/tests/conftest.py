import pytest
from hypothesis import settings

from sl2growth.constructions import optimal_construction
from sl2growth.sl2 import GroupTable, enumerate_group

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture(scope="session")
def g5():
    return GroupTable(5, cayley=True)


@pytest.fixture(scope="session")
def g13():
    return enumerate_group(13)


@pytest.fixture(scope="session")
def g17():
    return enumerate_group(17)


@pytest.fixture(scope="session")
def opt17():
    return optimal_construction(17)


@pytest.fixture(scope="session")
def p5_search():
    """The full SL(2,5) search, shared by the search and acceptance tests."""
    from sl2growth.search import SearchConfig, backtrack_search

    return backtrack_search(SearchConfig(p=5, conjugacy_prune_depth=3, worker_count=1))


_acceptance: dict[str, list] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid or report.when == "teardown":
        return
    name = report.nodeid.split("::")[-1]
    entry = _acceptance.setdefault(name, ["passed", 0.0])
    # shared fixtures (the full search) are timed in setup
    entry[1] += report.duration
    if report.outcome != "passed":
        entry[0] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, (outcome, dur) in _acceptance.items():
        mark = {"passed": "PASS", "failed": "FAIL"}.get(outcome, outcome.upper())
        terminalreporter.write_line(f"{mark:5s} {name}  ({dur:.1f}s)")
