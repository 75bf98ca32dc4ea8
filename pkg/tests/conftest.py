from fractions import Fraction

import pytest
from hypothesis import settings

from zerolimits.exactpoly import RatPoly
from zerolimits.fixtures import load_fixture
from zerolimits.recurrence import RecurrenceSpec

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def make_spec(a, b, c, d, e, W0=(1, 1), W1=(2, 6, 8), label=None) -> RecurrenceSpec:
    return RecurrenceSpec.from_values(
        a, b, c, d, e, RatPoly([Fraction(v) for v in W0]), RatPoly([Fraction(v) for v in W1]), label
    )


@pytest.fixture(scope="session")
def ladder() -> RecurrenceSpec:
    return load_fixture("ladder")


@pytest.fixture(scope="session")
def p4() -> RecurrenceSpec:
    return load_fixture("p4")


@pytest.fixture(scope="session")
def p4_raw() -> RecurrenceSpec:
    return load_fixture("p4_raw")


ACCEPTANCE_KEY = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[ACCEPTANCE_KEY] = {}


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config.stash.get(ACCEPTANCE_KEY, {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(results, key=lambda k: (int(k.rstrip("abc")), k)):
        ok, title, note, seconds = results[key]
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"criterion {key:<3} {status}  {title} ({seconds:.2f}s) {note}".rstrip())
