from importlib import resources

import pytest
from hypothesis import settings

from carrier_forge import KernelCache, load_scenario

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")


def scenario_path(name):
    return resources.files("carrier_forge") / "data" / "scenarios" / name


@pytest.fixture(scope="session")
def table1():
    return load_scenario(scenario_path("table1.toml"))


@pytest.fixture(scope="session")
def identical():
    return load_scenario(scenario_path("identical.toml"))


@pytest.fixture(scope="session")
def kernel_cache():
    return KernelCache(directory="")


ACCEPTANCE = {}


@pytest.fixture
def verdict():
    """Record one acceptance line; the test still asserts on its own."""

    def record(number, ok, detail):
        ACCEPTANCE[number] = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])
