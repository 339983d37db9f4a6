import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from qpbkit.fileformat import load_scenario

settings.register_profile("qpbkit", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("qpbkit")

CORPUS = Path(__file__).resolve().parents[1] / "src" / "qpbkit" / "corpus"


@pytest.fixture(scope="session")
def corpus():
    return CORPUS


# C(S3) over one point (non-abelian, needs a 2-dim irreducible frame)
S3_POINT = """
name = "point_s3"
[hopf]
type = "function_algebra"
table = [[1,2,3,4,5,6],[2,1,4,3,6,5],[3,5,1,6,2,4],[4,6,2,5,1,3],[5,3,6,1,4,2],[6,4,5,2,3,1]]
[base]
universal_points = 1
[bundle]
type = "hopf"
degree_cap = 1
"""

_cache = {}


def scenario(name):
    """Parsed corpus scenario, shared across tests (models are built lazily and cached)."""
    if name not in _cache:
        _cache[name] = load_scenario(CORPUS / f"{name}.toml")
    return _cache[name]


@pytest.fixture(scope="session")
def m2():
    return scenario("m2_z2")


@pytest.fixture(scope="session")
def m2_twisted():
    return scenario("m2_z2_twisted")


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(mod.RESULTS):
            terminalreporter.write_line(line)
