import numpy as np
import pytest

from puritylab import separability

separability.CROSS_CHECK = True

CRITERIA: dict[int, tuple[str, bool]] = {}


class _Criterion:
    def __init__(self, number, title):
        self.number, self.title = number, title

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        ok = exc_type is None
        prev = CRITERIA.get(self.number)
        CRITERIA[self.number] = (self.title, ok and (prev is None or prev[1]))
        return False


@pytest.fixture
def criterion():
    return _Criterion


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(CRITERIA):
        title, ok = CRITERIA[number]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {number}: {title}")


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


def haar_vector(rng, d):
    z = rng.normal(size=d) + 1j * rng.normal(size=d)
    return z / np.linalg.norm(z)


def random_density(rng, d, rank=None):
    rank = rank or int(rng.integers(1, d + 1))
    g = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    m = g @ g.conj().T
    return m / np.trace(m).real
