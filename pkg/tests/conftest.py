import random
from pathlib import Path

import pytest

from tautkit.census import generate_closed, random_closed
from tautkit.triangulation import load_triangulation

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def fig8():
    return load_triangulation(DATA / "fig8.tri")


@pytest.fixture(scope="session")
def solid_torus():
    return load_triangulation(DATA / "solid_torus_1tet.tri")


@pytest.fixture(scope="session")
def small_census():
    """All closed triangulations with at most three tetrahedra."""
    return [tri for n in (1, 2, 3) for tri in generate_closed(n)]


@pytest.fixture(scope="session")
def random_corpus():
    rng = random.Random(20240611)
    return [random_closed(rng, rng.randint(5, 8)) for _ in range(30)]



# criterion number -> PASS/FAIL line, filled in by test_acceptance.py
ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[number])
