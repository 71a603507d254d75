import numpy as np
import pytest

from linqubo import (
    LinearSystem,
    RadixEncoding,
    build_congruence,
    build_vanilla,
    congruence_diagonalize,
    gram,
)

# Worked 2x2 example, matrices transcribed entry by entry.
DEMO_A = [[3.0, 1.0], [-1.0, 2.0]]
DEMO_B = [-1.0, 5.0]

Q_HAT = np.array([
    [8, 6.4, 12.8, 0, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 19.2, 25.6, 0, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 51.2, 0, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, -4.8, 6.4, 12.8, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, -6.4, 25.6, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, -7.056, 3.136, 6.272, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, -12.544, 12.544, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, -18.816, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 0, 8.624, 3.136, 6.272],
    [0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 18.816, 12.544],
    [0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 43.904],
])

Q_HAT_PRIME = np.array([
    [26, 40, 80, -20, -40, -80, 2, 4, 8, -2, -4, -8],
    [0, 72, 160, -40, -80, -160, 4, 8, 16, -4, -8, -16],
    [0, 0, 224, -80, -160, -320, 8, 16, 32, -8, -16, -32],
    [0, 0, 0, -6, 40, 80, -2, -4, -8, 2, 4, 8],
    [0, 0, 0, 0, 8, 160, -4, -8, -16, 4, 8, 16],
    [0, 0, 0, 0, 0, 96, -8, -16, -32, 8, 16, 32],
    [0, 0, 0, 0, 0, 0, -13, 20, 40, -10, -20, -40],
    [0, 0, 0, 0, 0, 0, 0, -16, 80, -20, -40, -80],
    [0, 0, 0, 0, 0, 0, 0, 0, 8, -40, -80, -160],
    [0, 0, 0, 0, 0, 0, 0, 0, 0, 23, 20, 40],
    [0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 56, 80],
    [0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 152],
], dtype=float)

# unique congruence ground state, y = (-2, 5)
GROUND_BITS = (0, 0, 0, 0, 1, 0, 1, 0, 1, 0, 0, 0)

X1_PATTERNS = [
    (0, 0, 0, 1, 0, 0), (0, 1, 0, 1, 1, 0), (0, 0, 1, 1, 0, 1), (0, 1, 1, 1, 1, 1),
    (1, 0, 0, 0, 1, 0), (1, 0, 1, 0, 1, 1), (1, 1, 0, 0, 0, 1),
]
X2_PATTERNS = [
    (0, 0, 1, 0, 1, 0), (0, 1, 0, 0, 0, 0), (0, 1, 1, 0, 0, 1),
    (1, 0, 1, 1, 1, 0), (1, 1, 0, 1, 0, 0), (1, 1, 1, 1, 0, 1),
]

DEMO_PROBLEM_JSON = """{
  "A": [[3, 1], [-1, 2]],
  "b": [-1, 5],
  "encoding": {"low": 0, "high": 2},
  "scale": [0.4, 0.4]
}
"""


def all_assignments(n):
    idx = np.arange(2**n)
    return ((idx[:, None] >> np.arange(n - 1, -1, -1)) & 1).astype(np.int8)


@pytest.fixture(scope="session")
def demo_system():
    return LinearSystem(DEMO_A, DEMO_B)


@pytest.fixture(scope="session")
def demo_encoding():
    return RadixEncoding(2, 0, 2)


@pytest.fixture(scope="session")
def demo_dec(demo_system):
    return congruence_diagonalize(gram(demo_system.A), [0.4, 0.4])


@pytest.fixture(scope="session")
def q_hat(demo_system, demo_dec, demo_encoding):
    return build_congruence(demo_system, demo_dec, demo_encoding)


@pytest.fixture(scope="session")
def q_hat_prime(demo_system, demo_encoding):
    return build_vanilla(demo_system, demo_encoding)


@pytest.fixture
def demo_problem_path(tmp_path):
    p = tmp_path / "demo.json"
    p.write_text(DEMO_PROBLEM_JSON)
    return p


# Acceptance reporting: one PASS/FAIL line per criterion in the terminal summary.
_ACCEPTANCE = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(id, text): acceptance criterion")


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None or call.when != "call":
        return
    ident, text = marker.args
    ok = call.excinfo is None
    prev = _ACCEPTANCE.get(ident, (True, text))
    _ACCEPTANCE[ident] = (prev[0] and ok, text)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for ident in sorted(_ACCEPTANCE, key=lambda s: int(s.split("-")[1])):
        ok, text = _ACCEPTANCE[ident]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {ident}  {text}")
