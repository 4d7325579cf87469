import numpy as np
import pytest

from ufest.haar import RngStream, sample_haar


@pytest.fixture
def rng():
    return RngStream(12345)


@pytest.fixture
def gen():
    return np.random.default_rng(2024)


def haar_list(d, n, seed=0):
    rng = RngStream(seed)
    return [sample_haar(d, rng) for _ in range(n)]


def random_unit(gen, n):
    v = gen.standard_normal(n) + 1j * gen.standard_normal(n)
    return v / np.linalg.norm(v)


def random_matrix(gen, r, c=None):
    c = r if c is None else c
    return gen.standard_normal((r, c)) + 1j * gen.standard_normal((r, c))


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[key])
