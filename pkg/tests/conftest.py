import math

import pytest

from toricbloch.lattice import TorusLattice, enumerate_block_links


@pytest.fixture(scope="session")
def lat2():
    return TorusLattice(2)


@pytest.fixture(scope="session")
def lat3():
    return TorusLattice(3)


@pytest.fixture(scope="session")
def star00_k2(lat2):
    return lat2.mask(lat2.star_links(0, 0))


@pytest.fixture(scope="session")
def block31(lat3):
    return lat3.mask(enumerate_block_links(3, 1).link_set)


ANGLE_POINTS = [
    (0.0, 0.0),
    (math.pi / 3, math.pi / 5),
    (1.7, 4.0),
    (math.pi, 0.0),
    (2.9, 2.2),
]


_VERDICTS: list[str] = []


@pytest.fixture
def verdict(request):
    """Record one pass/fail line for an acceptance criterion, then assert it."""
    def record(label: str, ok: bool, detail: str = ""):
        line = f"[{'PASS' if ok else 'FAIL'}] {label}" + (f": {detail}" if detail else "")
        _VERDICTS.append(line)
        print(line)
        assert ok, line
    return record


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in _VERDICTS:
            terminalreporter.write_line(line)
