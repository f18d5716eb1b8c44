import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from camel.benchmarks import random_circuit
from camel.circuit import (
    Circuit,
    DurationConfig,
    Gate,
    GateKind,
    attach_durations,
    build_dag,
    emit_circuit,
    parse_circuit,
    top_layer,
    topological_order,
)
from camel.errors import MissingDuration, NotDownwardClosed, QasmSyntaxError, QubitOutOfRange, UnsupportedGate

K = GateKind


def test_parse_single_cz():
    c = parse_circuit("qreg q[2]; cz q[0],q[1];")
    assert c.num_qubits == 2
    assert c.ops() == [(K.CZ, (0, 1), None)]


def test_parse_empty_body():
    c = parse_circuit("qreg q[1];")
    assert c == Circuit(1, ())


def test_parse_rejects_unknown_gate():
    with pytest.raises(UnsupportedGate) as exc:
        parse_circuit("qreg q[2]; cnot q[0],q[1];")
    assert exc.value.name == "cnot"


def test_parse_header_params_and_registers():
    text = """OPENQASM 2.0;
    qreg q[3];
    creg c[3];
    h q[0];
    rz(pi/2) q[1];
    rz(-0.25*pi + 1) q[2];
    barrier q;
    measure q[0] -> c[0];
    measure q -> c;
    """
    c = parse_circuit(text)
    assert [g.kind for g in c.gates] == [K.H, K.RZ, K.RZ, K.BARRIER] + [K.MEASURE] * 4
    assert c.gates[1].param == pytest.approx(math.pi / 2)
    assert c.gates[2].param == pytest.approx(1 - math.pi / 4)
    assert c.gates[3].operands == (0, 1, 2)
    assert [g.operands for g in c.gates[5:]] == [(0,), (1,), (2,)]


def test_parse_out_of_range():
    with pytest.raises(QubitOutOfRange):
        parse_circuit("qreg q[2]; x q[2];")


@pytest.mark.parametrize(
    "text, token",
    [
        ("qreg q[2]; cz q[0] q[1];", "q"),
        ("qreg q[2]; x q[0]", "<eof>"),
        ("include \"qelib1.inc\"; qreg q[1];", "include"),
        ("qreg q[2]; cz q[0],q[0];", "cz"),
        ("qreg q[1]; x q[0]; $", "$"),
    ],
)
def test_parse_syntax_errors_carry_position(text, token):
    with pytest.raises(QasmSyntaxError) as exc:
        parse_circuit(text)
    assert exc.value.token == token
    assert exc.value.line >= 1 and exc.value.column >= 1


def test_syntax_error_line_and_column():
    with pytest.raises(QasmSyntaxError) as exc:
        parse_circuit("qreg q[2];\nh q[0];\n  cz q[0];\n")
    assert (exc.value.line, exc.value.column) == (3, 3)


def test_emit_examples():
    assert emit_circuit(Circuit.from_ops(2, [(K.CZ, (0, 1))])) == "OPENQASM 2.0;\nqreg q[2];\ncz q[0],q[1];\n"
    assert emit_circuit(Circuit(3)) == "OPENQASM 2.0;\nqreg q[3];\n"
    assert "barrier q[0],q[1];" in emit_circuit(Circuit.from_ops(2, [(K.BARRIER, (0, 1))]))


def test_emit_parse_round_trip_all_kinds():
    c = Circuit.from_ops(3, [
        (K.X, (0,)), (K.H, (1,)), (K.RZ, (2,), -1e-5), (K.CZ, (0, 2)), (K.SWAP, (1, 2)),
        (K.BARRIER, (0, 1, 2)), (K.MEASURE, (1,)),
    ])
    assert parse_circuit(emit_circuit(c)) == c


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6), st.integers(0, 50), st.integers(0, 10_000))
def test_round_trip_random(n, g, seed):
    c = random_circuit(n, g, seed)
    assert parse_circuit(emit_circuit(c)) == c


def test_gate_validation():
    with pytest.raises(ValueError):
        Gate(0, K.CZ, (1, 1))
    with pytest.raises(ValueError):
        Gate(0, K.X, (0, 1))
    with pytest.raises(QubitOutOfRange):
        Circuit.from_ops(1, [(K.X, (1,))])


def test_build_dag_examples():
    assert build_dag(Circuit.from_ops(2, [(K.CZ, (0, 1))])).edges == ()
    assert build_dag(Circuit.from_ops(2, [(K.X, (0,)), (K.CZ, (0, 1))])).edges == ((0, 1),)
    d = build_dag(Circuit.from_ops(4, [(K.CZ, (0, 1)), (K.CZ, (2, 3)), (K.CZ, (1, 2))]))
    assert d.edges == ((0, 2), (1, 2))


def test_build_dag_single_edge_for_double_dependency():
    d = build_dag(Circuit.from_ops(2, [(K.CZ, (0, 1)), (K.CZ, (0, 1))]))
    assert d.edges == ((0, 1),)


def _chain():
    return build_dag(Circuit.from_ops(1, [(K.X, (0,))] * 3))


def _diamond():
    return build_dag(Circuit.from_ops(2, [(K.CZ, (0, 1)), (K.X, (0,)), (K.X, (1,)), (K.CZ, (0, 1))]))


def test_top_layer_examples():
    assert top_layer(_chain(), set()) == {0}
    assert top_layer(_chain(), {0}) == {1}
    assert top_layer(_diamond(), {0}) == {1, 2}


def test_top_layer_not_downward_closed():
    with pytest.raises(NotDownwardClosed):
        top_layer(_chain(), {1})


def test_attach_durations():
    c = attach_durations(
        Circuit.from_ops(2, [(K.CZ, (0, 1)), (K.X, (0,)), (K.H, (1,)), (K.BARRIER, (0, 1)), (K.MEASURE, (0,))]),
        DurationConfig(),
    )
    assert [g.duration for g in c.gates] == [40.0, 20.0, 20.0, 0.0, 500.0]


def test_missing_duration_only_for_present_kind():
    cfg = DurationConfig(t_swap=None)
    attach_durations(Circuit.from_ops(2, [(K.CZ, (0, 1))]), cfg)
    with pytest.raises(MissingDuration):
        attach_durations(Circuit.from_ops(2, [(K.SWAP, (0, 1))]), cfg)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 6), st.integers(0, 50), st.integers(0, 10_000), st.randoms(use_true_random=False))
def test_any_topological_order_preserves_per_qubit_sequence(n, g, seed, rnd):
    c = random_circuit(n, g, seed)
    d = build_dag(c)
    key = [rnd.random() for _ in d.gates]
    order = topological_order(d, key)
    assert sorted(order) == list(range(len(d.gates)))
    for q in range(n):
        original = [gate.id for gate in c.gates if q in gate.operands]
        replayed = [i for i in order if q in c.gates[i].operands]
        assert original == replayed
