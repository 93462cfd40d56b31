import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from specphase.ensembles import Graph
from specphase.errors import CapacityError, ParameterError, SingularPartitionError
from specphase.objectives import (
    Bipartition,
    equivalence_certificate,
    exhaustive_optima,
    modularity_double_sum,
    modularity_q,
    ncut,
    spin_identities,
)

from conftest import complete_graph, cycle, random_connected_graph, random_graph, two_k4


def brute_ncut(g: Graph):
    """Plain-Python oracle: every labeling with node 0 on side 1."""
    edges = list(zip(*(x.tolist() for x in g.edges())))
    deg = g.degrees.tolist()
    k = sum(deg)
    best, arg = None, set()
    for rest in itertools.product((1, 2), repeat=g.n_nodes - 1):
        lab = (1,) + rest
        k1 = sum(d for d, l in zip(deg, lab) if l == 1)
        k2 = k - k1
        if k1 == 0 or k2 == 0:
            continue
        cut = sum(1 for a, b in edges if lab[a] != lab[b])
        val = Fraction(k * cut, k1 * k2)
        if best is None or val < best:
            best, arg = val, {lab}
        elif val == best:
            arg.add(lab)
    return best, arg


def test_modularity_examples():
    g = two_k4()
    part = Bipartition.from_labels(g.planted_labels)
    # sAs = K = 24, c.s = 0
    assert modularity_q(g, part, 1) == 24
    whole = Bipartition([1] * 8, unpartitioned=True)
    assert modularity_q(g, whole, 1) == 0
    assert modularity_q(g, whole, Fraction(1, 2)) == 12
    assert isinstance(modularity_q(g, part, 0.5), float)


def test_ncut_examples():
    c4 = cycle(4)
    assert ncut(c4, Bipartition([1, 1, 2, 2])) == 1
    assert ncut(c4, Bipartition([1, 2, 1, 2])) == 2
    assert ncut(two_k4(), Bipartition.from_labels(two_k4().planted_labels)) == 0
    with pytest.raises(SingularPartitionError):
        ncut(c4, Bipartition([1, 1, 1, 1], unpartitioned=True))
    with pytest.raises(SingularPartitionError):
        ncut(Graph.from_pairs(3, [(0, 1)]), Bipartition([1, 1, 2]))


def test_bipartition_validation():
    with pytest.raises(ParameterError):
        Bipartition([1, 1, 1])
    with pytest.raises(ParameterError):
        Bipartition([1, 2, 2], unpartitioned=True)
    with pytest.raises(ParameterError):
        Bipartition([1, 3])
    assert Bipartition.from_spins([1, -1, -1]).canonical() == Bipartition([2, 1, 1]).canonical()


@given(seed=st.integers(0, 2**31), n=st.integers(2, 14))
def test_spin_identities_and_double_sum(seed, n):
    rng = np.random.default_rng(seed)
    g = random_graph(n, 0.4, rng)
    if g.n_edges == 0:
        return
    lab = rng.integers(1, 3, n)
    lab[0], lab[-1] = 1, 2
    part = Bipartition(lab)
    rec = spin_identities(g, part)
    assert rec.k1 + rec.k2 == g.total_degree
    theta = Fraction(int(rng.integers(1, 9)), int(rng.integers(1, 9)))
    q = modularity_q(g, part, theta)
    assert q == 2 * modularity_double_sum(g, part, theta) - g.total_degree * (1 - theta)


@given(seed=st.integers(0, 2**31), n=st.integers(3, 12))
def test_modularity_nonincreasing_in_theta(seed, n):
    rng = np.random.default_rng(seed)
    g = random_graph(n, 0.5, rng)
    if g.n_edges == 0:
        return
    lab = np.r_[1, 2, rng.integers(1, 3, n - 2)]
    part = Bipartition(lab)
    thetas = sorted(Fraction(int(a), 7) for a in rng.integers(1, 30, 6))
    vals = [modularity_q(g, part, t) for t in thetas]
    assert all(a >= b for a, b in zip(vals, vals[1:]))


def test_exhaustive_c4():
    opt = exhaustive_optima(cycle(4), "ncut")
    assert opt.value == 1
    assert opt.labelings == {(1, 1, 2, 2), (1, 2, 2, 1)}
    assert opt.n_evaluated == 7


def test_exhaustive_matches_brute_force(rng):
    for n in (4, 6, 8, 10):
        for _ in range(4):
            g = random_connected_graph(n, rng, 0.35)
            best, arg = brute_ncut(g)
            opt = exhaustive_optima(g, "ncut")
            assert opt.value == best and opt.labelings == arg


def test_exhaustive_modularity_float_and_exact_agree(rng):
    g = random_connected_graph(9, rng, 0.4)
    exact = exhaustive_optima(g, "modularity", Fraction(3, 4))
    approx = exhaustive_optima(g, "modularity", 0.75)
    assert approx.labelings == exact.labelings
    assert approx.value == pytest.approx(float(exact.value), rel=1e-12)


def test_exhaustive_unpartitioned_wins_at_small_theta():
    g = Graph.from_pairs(4, complete_graph(4))
    opt = exhaustive_optima(g, "modularity", Fraction(1, 10), include_unpartitioned=True)
    assert opt.labelings == {(1, 1, 1, 1)}


def test_exhaustive_capacity_and_arguments():
    with pytest.raises(CapacityError):
        exhaustive_optima(cycle(21), "ncut")
    with pytest.raises(ParameterError):
        exhaustive_optima(cycle(4), "conductance")
    with pytest.raises(ParameterError):
        exhaustive_optima(cycle(4), "modularity", 0)
    assert issubclass(CapacityError, ParameterError)


def test_equivalence_c4():
    cert = equivalence_certificate(cycle(4))
    assert cert.theta_star == 1
    assert cert.holds


@pytest.mark.parametrize("n", [5, 7, 9, 12])
def test_equivalence_random_graphs(n, rng):
    for _ in range(5):
        g = random_connected_graph(n, rng, 0.3)
        cert = equivalence_certificate(g)
        assert cert.sets_equal, cert
        assert cert.inequality_holds and cert.equality_exactly_on_optima
