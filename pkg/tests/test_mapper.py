import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from camel.benchmarks import worked_fragment, random_circuit
from camel.chip import build_grid
from camel.circuit import Circuit, DurationConfig, GateKind, attach_durations, build_dag
from camel.errors import CircuitTooLarge
from camel.mapper import (
    Context,
    Frontier,
    Mapping,
    SearchParams,
    Swap,
    camel_map,
    score_step,
    search_forward,
    swap_candidates,
    swap_permutation,
    validate_routing,
)

K = GateKind


def dag_of(n, ops):
    return build_dag(attach_durations(Circuit.from_ops(n, ops), DurationConfig()))


def ctx_for(chip, dag, window=(2, 2), **params):
    m, n = window
    return Context(chip, dag, DurationConfig(), m + n - 2, SearchParams(**params))


def trivial(chip, dag):
    return Mapping.trivial(dag.num_qubits, chip.num_qubits)


def test_mapping_swap_and_inverse():
    pi = Mapping.from_forward([2, 0], 4)
    assert pi.inverse == (1, -1, 0, -1)
    nxt = pi.swapped(2, 3)
    assert nxt.forward == (3, 0) and nxt.inverse == (1, -1, -1, 0)
    assert not nxt.mapped(2)
    with pytest.raises(ValueError):
        Mapping.from_forward([1, 1], 3)


def test_random_mapping_is_seeded():
    assert Mapping.random(5, 9, 4) == Mapping.random(5, 9, 4)
    assert sorted(Mapping.random(9, 9, 1).forward) == list(range(9))


@pytest.mark.parametrize("kwargs", [{"depth": 5}, {"depth": -1}, {"width": 0}, {"width": 17}, {"initial": "x"}])
def test_search_params_bounds(kwargs):
    with pytest.raises(ValueError):
        SearchParams(**kwargs)


def test_score_two_far_czs():
    chip = build_grid(1, 6)
    dag = dag_of(6, [(K.CZ, (0, 1)), (K.CZ, (4, 5))])
    assert score_step(trivial(chip, dag), [0, 1], ctx_for(chip, dag)) == pytest.approx(0.05)


def test_score_toy_mapping_scheme():
    # Three vertical CZs on a 2x4 chip: spread out they share a layer, packed
    # side by side the induced component is too wide for one 2x2 window.
    chip = build_grid(2, 4)
    dag = dag_of(6, [(K.CZ, (0, 1)), (K.CZ, (2, 3)), (K.CZ, (4, 5))])
    ctx = ctx_for(chip, dag)
    spread = Mapping.from_forward([0, 4, 1, 5, 3, 7], 8)
    packed = Mapping.from_forward([0, 4, 1, 5, 2, 6], 8)
    s_b = score_step(spread, [0, 1, 2], ctx)
    s_c = score_step(packed, [0, 1, 2], ctx)
    assert s_b == pytest.approx(3 / 40)
    assert s_c == pytest.approx(3 / 80)
    assert s_b > s_c


def test_score_counts_swaps_as_executed():
    chip = build_grid(1, 11)
    dag = dag_of(11, [(K.CZ, (0, 1)), (K.CZ, (3, 4)), (K.CZ, (6, 7))])
    ctx = ctx_for(chip, dag)
    items = [0, 1, 2, Swap(9, 10)]
    assert score_step(trivial(chip, dag), items, ctx) == pytest.approx((4 - 3) / 120)
    ctx_off = ctx_for(chip, dag, count_swaps_as_executed=False)
    assert score_step(trivial(chip, dag), items, ctx_off) == pytest.approx((3 - 3) / 120)


def test_score_window_zero_delays_adjacent_pairs():
    chip = build_grid(1, 4)
    dag = dag_of(4, [(K.CZ, (0, 1)), (K.CZ, (2, 3))])
    pi = trivial(chip, dag)
    assert score_step(pi, [0, 1], ctx_for(chip, dag, window=(0, 0))) == pytest.approx(2 / 80)
    assert score_step(pi, [0, 1], ctx_for(chip, dag, window=(1, 4))) == pytest.approx(2 / 40)
    assert score_step(pi, [0, 1], ctx_for(chip, dag, window=(0, 0), parallel_constraint=False)) == pytest.approx(2 / 40)


def test_score_skips_measure_and_barrier():
    chip = build_grid(1, 2)
    dag = dag_of(2, [(K.CZ, (0, 1)), (K.BARRIER, (0, 1)), (K.MEASURE, (0,))])
    assert score_step(trivial(chip, dag), [0, 1, 2], ctx_for(chip, dag)) == pytest.approx(1 / 40)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_score_monotone_for_free_gates(seed):
    # A single-qubit gate on an otherwise idle qubit fits inside the existing span.
    chip = build_grid(2, 4)
    c = random_circuit(7, 10, seed, two_qubit_ratio=0.8)
    ops = c.ops() + [(K.X, (7,), None)]
    dag = dag_of(8, [(k, o) if p is None else (k, o, p) for k, o, p in ops])
    ctx = ctx_for(chip, dag, parallel_constraint=False)
    pi = trivial(chip, dag)
    base = list(range(len(c.gates)))
    if not base:
        return
    before = score_step(pi, base, ctx)
    assert score_step(pi, base + [len(c.gates)], ctx) >= before


def test_swap_candidates_on_path():
    chip = build_grid(1, 4)
    dag = dag_of(4, [(K.CZ, (0, 2))])
    cands = swap_candidates(trivial(chip, dag), {0}, dag, chip.distances, chip)
    assert [(c.edge, c.d) for c in cands] == [((0, 1), 1), ((1, 2), 1), ((2, 3), 3)]


def test_swap_candidates_floor_when_adjacent():
    chip = build_grid(2, 3)
    dag = dag_of(6, [(K.CZ, (0, 1)), (K.CZ, (3, 4))])
    F = {0, 1}
    assert all(c.d >= len(F) for c in swap_candidates(trivial(chip, dag), F, dag, chip.distances, chip))


def test_swap_candidates_exclude_unmapped_couplers():
    chip = build_grid(1, 4)
    dag = dag_of(2, [(K.CZ, (0, 1))])
    cands = swap_candidates(Mapping.trivial(2, 4), {0}, dag, chip.distances, chip)
    assert [c.edge for c in cands] == [(0, 1), (1, 2)]


def test_search_forward_base_case():
    chip = build_grid(1, 4)
    dag = dag_of(4, [(K.CZ, (0, 1)), (K.CZ, (2, 3)), (K.X, (0,))])
    out = search_forward(trivial(chip, dag), Frontier(dag), 0, 4, ctx_for(chip, dag))
    assert out == [0, 1]


def test_search_forward_single_swap():
    chip = build_grid(1, 3)
    dag = dag_of(2, [(K.CZ, (0, 1))])
    pi = Mapping.from_forward([0, 2], 3)
    out = search_forward(pi, Frontier(dag), 1, 1, ctx_for(chip, dag))
    assert out == [Swap(0, 1), 0]


def test_search_forward_width_saturates():
    chip = build_grid(2, 3)
    dag = dag_of(6, [(K.CZ, (0, 5)), (K.CZ, (2, 3)), (K.CZ, (1, 4))])
    pi = trivial(chip, dag)
    ctx = ctx_for(chip, dag)
    full = search_forward(pi, Frontier(dag), 2, len(chip.edges), ctx)
    assert search_forward(pi, Frontier(dag), 2, 16, ctx) == full


def test_map_adjacent_circuit_needs_no_swaps():
    chip = build_grid(2, 4)
    d = build_dag(attach_durations(worked_fragment(), DurationConfig()))
    out, pi0, pi_f = camel_map(chip, d, initial=Mapping.trivial(8, 8))
    circ = out.circuit()
    assert circ.count(K.SWAP) == 0
    assert pi0 == pi_f
    assert sorted(circ.ops()) == sorted(worked_fragment().ops())


def test_map_distant_cz_inserts_swaps():
    chip = build_grid(1, 4)
    d = dag_of(2, [(K.CZ, (0, 1))])
    out, pi0, pi_f = camel_map(chip, d, initial=Mapping.from_forward([0, 3], 4))
    circ = out.circuit()
    assert circ.count(K.SWAP) >= 1
    assert validate_routing(circ, chip) == []
    cz = next(g for g in circ.gates if g.kind is K.CZ)
    assert chip.coupled(*cz.operands)
    assert {pi_f(0), pi_f(1)} == set(cz.operands)


def test_map_rejects_oversized_circuit():
    with pytest.raises(CircuitTooLarge):
        camel_map(build_grid(1, 2), dag_of(3, [(K.X, (2,))]))


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 9), st.integers(0, 60), st.integers(0, 10_000), st.sampled_from([(2, 2), (0, 0)]))
def test_routing_valid_and_complete(n, g, seed, window):
    chip = build_grid(3, 3)
    c = random_circuit(n, g, seed)
    d = build_dag(attach_durations(c, DurationConfig()))
    out, pi0, pi_f = camel_map(chip, d, SearchParams(seed=seed), window=window)
    circ = out.circuit()
    assert validate_routing(circ, chip) == []
    assert circ.count(K.SWAP) + len(c.gates) == len(circ.gates)
    # replaying the SWAPs from the initial mapping reproduces the final one
    pi = pi0
    for gate in circ.gates:
        if gate.kind is K.SWAP:
            pi = pi.swapped(*gate.operands)
    assert pi == pi_f


def test_mapping_is_deterministic():
    chip = build_grid(3, 3)
    d = build_dag(attach_durations(random_circuit(9, 80, 5), DurationConfig()))
    a = camel_map(chip, d, SearchParams(seed=3))
    b = camel_map(chip, d, SearchParams(seed=3))
    assert a.dag.gates == b.dag.gates and a.final == b.final


def test_swap_permutation():
    c = Circuit.from_ops(3, [(K.SWAP, (0, 1)), (K.SWAP, (1, 2))])
    # content of 0 goes 0 -> 1 -> 2; content of 2 ends on 1; content of 1 ends on 0
    assert swap_permutation(c) == [2, 0, 1]


def test_validate_routing_reports_bad_gates():
    chip = build_grid(1, 3)
    c = Circuit.from_ops(3, [(K.CZ, (0, 1)), (K.CZ, (0, 2))])
    assert validate_routing(c, chip) == [1]
