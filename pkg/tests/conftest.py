import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from veronese_groups.moebius import MoebiusMap, four_disk_schottky, genus2_octagon_group

settings.register_profile(
    "repo", derandomize=True, deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("repo")


def random_complex(rng, size=None, scale=1.0):
    return scale * (rng.standard_normal(size) + 1j * rng.standard_normal(size))


def random_moebius(rng, scale=1.0) -> MoebiusMap:
    while True:
        m = random_complex(rng, (2, 2), scale)
        if abs(np.linalg.det(m)) > 1e-2:
            return MoebiusMap(m)


def symmetric_square(m) -> np.ndarray:
    """Independent oracle for iota: g acting on v (x) v, read back in psi coordinates.

    psi(v) = A (v kron v) with A = [[1,0,0,0],[0,1,1,0],[0,0,0,1]] and B = [[1,0,0],[0,1/2,0],[0,1/2,0],[0,0,1]]
    inverts it on symmetric tensors, so iota(g) = A (g kron g) B.
    """
    a = np.array([[1, 0, 0, 0], [0, 1, 1, 0], [0, 0, 0, 1]], dtype=complex)
    b = np.array([[1, 0, 0], [0, 0.5, 0], [0, 0.5, 0], [0, 0, 1]], dtype=complex)
    m = np.asarray(m, dtype=complex)
    return a @ np.kron(m, m) @ b


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture(scope="session")
def schottky4():
    return four_disk_schottky()


@pytest.fixture(scope="session")
def octagon():
    return genus2_octagon_group()


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
