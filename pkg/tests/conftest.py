import itertools

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from specphase.ensembles import Graph

settings.register_profile(
    "default", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("default")


def complete_graph(n, offset=0):
    return [(offset + i, offset + j) for i, j in itertools.combinations(range(n), 2)]


def two_k4(labels=True):
    edges = complete_graph(4) + complete_graph(4, 4)
    return Graph.from_pairs(8, edges, [1] * 4 + [2] * 4 if labels else None)


def cycle(n):
    return Graph.from_pairs(n, [(i, (i + 1) % n) for i in range(n)])


def random_graph(n, p, rng, labels=False):
    """Erdos-Renyi G(n, p); may be disconnected or have isolated nodes."""
    iu, ju = np.triu_indices(n, 1)
    keep = rng.random(iu.size) < p
    lab = rng.integers(1, 3, size=n) if labels else None
    return Graph.from_edges(n, iu[keep], ju[keep], lab)


def random_connected_graph(n, rng, extra_p=0.3):
    """Random spanning tree plus independent extra edges: always connected."""
    order = rng.permutation(n)
    edges = {tuple(sorted((int(order[i]), int(order[rng.integers(0, i)])))) for i in range(1, n)}
    iu, ju = np.triu_indices(n, 1)
    extra = rng.random(iu.size) < extra_p
    edges |= {(int(a), int(b)) for a, b in zip(iu[extra], ju[extra])}
    return Graph.from_pairs(n, sorted(edges))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[ACCEPTANCE] = {}


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config.stash.get(ACCEPTANCE, {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(results):
        ok, detail = results[num]
        terminalreporter.write_line(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
