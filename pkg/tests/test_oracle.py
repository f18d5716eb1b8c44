import itertools
import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from camel.benchmarks import random_circuit
from camel.chip import build_grid
from camel.circuit import Circuit, GateKind
from camel.errors import TooLarge
from camel.oracle import (
    circuit_unitary,
    count_matchings,
    count_matchings_bruteforce,
    exact_mis,
    is_independent,
    is_maximal,
    min_is_cover,
    permutation_matrix,
    unitary_equiv,
)

K = GateKind


def cycle(n):
    return [(i, (i + 1) % n) for i in range(n)]


def test_exact_mis_examples():
    assert len(exact_mis(range(5), cycle(5))) == 2
    assert exact_mis(range(5), [(0, i) for i in range(1, 5)]) == {1, 2, 3, 4}
    assert exact_mis([], []) == set()


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 10), st.floats(0, 1), st.integers(0, 10_000))
def test_exact_mis_matches_enumeration(n, p, seed):
    rng = random.Random(seed)
    edges = [e for e in itertools.combinations(range(n), 2) if rng.random() < p]
    best = max(
        r for r in range(n + 1)
        for s in itertools.combinations(range(n), r) if is_independent(s, edges)
    )
    got = exact_mis(range(n), edges)
    assert is_independent(got, edges) and len(got) == best


def test_independence_helpers():
    assert is_independent({0, 2}, [(0, 1), (1, 2)])
    assert not is_independent({0, 1}, [(0, 1)])
    assert is_maximal({1}, range(3), [(0, 1), (1, 2)])
    assert not is_maximal({0}, range(3), [(0, 1), (1, 2)])


@pytest.mark.parametrize(
    "nodes, edges, k",
    [
        ("abcd", [("a", "b"), ("b", "c")], 2),
        (range(4), [], 1),
        (range(3), cycle(3), 3),
        (range(5), cycle(5), 3),
        (range(4), list(itertools.combinations(range(4), 2)), 4),
        ([], [], 0),
    ],
)
def test_min_is_cover_examples(nodes, edges, k):
    if isinstance(nodes, str):
        idx = {c: i for i, c in enumerate(nodes)}
        nodes = range(len(idx))
        edges = [(idx[a], idx[b]) for a, b in edges]
    assert min_is_cover(list(nodes), edges) == k


def test_min_is_cover_too_large():
    with pytest.raises(TooLarge):
        min_is_cover(list(range(13)), [])


@pytest.mark.parametrize(
    "edges, count",
    [(cycle(4), 7), ([(0, 1)], 2), ([(0, 1), (1, 2)], 3), ([], 1), (cycle(5), 11)],
)
def test_count_matchings_examples(edges, count):
    assert count_matchings(edges) == count
    assert count_matchings_bruteforce(edges) == count


@pytest.mark.parametrize("M, N", [(1, 4), (2, 2), (2, 3), (3, 3), (2, 4)])
def test_count_matchings_cross_check_grids(M, N):
    g = build_grid(M, N)
    assert count_matchings(g) == count_matchings_bruteforce(list(g.edges))


def test_count_matchings_too_large():
    with pytest.raises(TooLarge):
        count_matchings(build_grid(4, 4))


def test_circuit_unitary_gates():
    h = circuit_unitary(Circuit.from_ops(1, [(K.H, (0,))]))
    assert np.allclose(h, np.array([[1, 1], [1, -1]]) / math.sqrt(2))
    cz = circuit_unitary(Circuit.from_ops(2, [(K.CZ, (0, 1))]))
    assert np.allclose(cz, np.diag([1, 1, 1, -1]))
    swap = circuit_unitary(Circuit.from_ops(2, [(K.SWAP, (0, 1))]))
    assert np.allclose(swap, np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]]))
    # barrier and measure are ignored
    assert np.allclose(circuit_unitary(Circuit.from_ops(2, [(K.BARRIER, (0, 1)), (K.MEASURE, (0,))])), np.eye(4))


def test_permutation_matrix_matches_swap_network():
    # content of 0 goes to 2, content of 1 to 0, content of 2 to 1
    c = Circuit.from_ops(3, [(K.SWAP, (0, 1)), (K.SWAP, (1, 2))])
    assert np.allclose(circuit_unitary(c), permutation_matrix([2, 0, 1]))


def test_unitary_equiv_examples():
    a = Circuit.from_ops(2, [(K.H, (0,)), (K.CZ, (0, 1))])
    assert unitary_equiv(a, a, [0, 1])
    assert not unitary_equiv(a, Circuit.from_ops(2, [(K.H, (1,)), (K.CZ, (0, 1))]), [0, 1])
    routed = Circuit.from_ops(2, [(K.H, (0,)), (K.CZ, (0, 1)), (K.SWAP, (0, 1))])
    assert unitary_equiv(a, routed, [1, 0])
    assert not unitary_equiv(a, routed, [0, 1])
    # global phase is ignored: X Z X Z = -I
    phase = Circuit.from_ops(1, [(K.X, (0,)), (K.RZ, (0,), math.pi), (K.X, (0,)), (K.RZ, (0,), math.pi)])
    assert unitary_equiv(Circuit(1), phase, [0])


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 5), st.integers(0, 25), st.integers(0, 10_000))
def test_unitary_equiv_reflexive_with_ancillas(n, g, seed):
    c = random_circuit(n, g, seed)
    padded = Circuit.from_ops(n + 1, [(k, o) if p is None else (k, o, p) for k, o, p in c.ops()])
    assert unitary_equiv(c, padded, list(range(n + 1)))


def test_unitary_limits():
    with pytest.raises(TooLarge):
        circuit_unitary(Circuit(11))
    with pytest.raises(TooLarge):
        unitary_equiv(Circuit(9), Circuit(9), list(range(9)))
    with pytest.raises(ValueError):
        unitary_equiv(Circuit(2), Circuit(2), [0])
