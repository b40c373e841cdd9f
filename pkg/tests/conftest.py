"""Shared fixtures (bundled reference configs) and the acceptance report.

The acceptance tests in test_acceptance.py are named test_cNN_*; the hook
below prints one PASS/FAIL line per criterion at the end of the run.
"""

import pytest

from tendonsim.cli import DATA_DIR, parse_config

_criterion_outcomes = {}


def pytest_runtest_logreport(report):
    if report.when != "call":
        return
    name = report.nodeid.rsplit("::", 1)[-1]
    if name.startswith("test_c") and name[6:8].isdigit():
        _criterion_outcomes[int(name[6:8])] = (report.outcome, name)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _criterion_outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criterion_outcomes):
        outcome, name = _criterion_outcomes[n]
        word = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"CRITERION {n:02d} {word}  ({name})")


@pytest.fixture(scope="session")
def ica():
    return parse_config(DATA_DIR / "ica.yaml")


@pytest.fixture(scope="session")
def eca():
    return parse_config(DATA_DIR / "eca.yaml")


@pytest.fixture(scope="session")
def misa():
    return parse_config(DATA_DIR / "misa_like.yaml")


@pytest.fixture(scope="session")
def ica_pair():
    return parse_config(DATA_DIR / "ica_joint.yaml")


@pytest.fixture(scope="session")
def eca_pair():
    return parse_config(DATA_DIR / "eca_joint.yaml")


@pytest.fixture(scope="session")
def arm():
    return parse_config(DATA_DIR / "arm.yaml")


@pytest.fixture(scope="session")
def lift():
    return parse_config(DATA_DIR / "lift_dumbbell.yaml")
