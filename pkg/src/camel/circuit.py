"""Gate-level circuit IR: OpenQASM-2 subset parser/emitter, dependency DAG, durations."""

from __future__ import annotations

import ast
import heapq
import math
import operator
import re
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field, replace
from enum import Enum

from .errors import MissingDuration, NotDownwardClosed, QasmSyntaxError, QubitOutOfRange, UnsupportedGate


class GateKind(str, Enum):
    X = "x"
    H = "h"
    RZ = "rz"
    CZ = "cz"
    SWAP = "swap"
    BARRIER = "barrier"
    MEASURE = "measure"

    @property
    def is_two_qubit(self) -> bool:
        return self in (GateKind.CZ, GateKind.SWAP)

    @property
    def is_single_qubit(self) -> bool:
        return self in (GateKind.X, GateKind.H, GateKind.RZ)


@dataclass(frozen=True)
class Gate:
    id: int
    kind: GateKind
    operands: tuple[int, ...]
    param: float | None = None
    duration: float = 0.0

    def __post_init__(self):
        if len(set(self.operands)) != len(self.operands):
            raise ValueError(f"gate {self.id}: repeated operand in {self.operands}")
        expected = {GateKind.CZ: 2, GateKind.SWAP: 2}.get(self.kind, 1 if self.kind.is_single_qubit else None)
        if expected is not None and len(self.operands) != expected:
            raise ValueError(f"gate {self.id}: {self.kind.value} takes {expected} operand(s)")
        if not self.operands:
            raise ValueError(f"gate {self.id}: no operands")

    @property
    def is_two_qubit(self) -> bool:
        return self.kind.is_two_qubit


@dataclass(frozen=True)
class Circuit:
    num_qubits: int
    gates: tuple[Gate, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            for q in g.operands:
                if not 0 <= q < self.num_qubits:
                    raise QubitOutOfRange(f"gate {g.id} uses qubit {q}, register has {self.num_qubits}")

    @classmethod
    def from_ops(cls, num_qubits: int, ops: Iterable[tuple]) -> "Circuit":
        """Build a circuit from ``(kind, operands[, param])`` tuples, numbering gates in order."""
        gates = []
        for i, op in enumerate(ops):
            kind = GateKind(op[0]) if not isinstance(op[0], GateKind) else op[0]
            param = op[2] if len(op) > 2 else None
            gates.append(Gate(i, kind, tuple(op[1]), param))
        return cls(num_qubits, tuple(gates))

    def renumbered(self) -> "Circuit":
        return Circuit(self.num_qubits, tuple(replace(g, id=i) for i, g in enumerate(self.gates)))

    def count(self, kind: GateKind) -> int:
        return sum(1 for g in self.gates if g.kind is kind)

    def ops(self) -> list[tuple]:
        """Gate list without ids or durations; handy for equality checks."""
        return [(g.kind, g.operands, g.param) for g in self.gates]


# ---------------------------------------------------------------------------
# Parsing

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>//[^\n]*)
  | (?P<string>"[^"\n]*")
  | (?P<number>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<arrow>->)
  | (?P<sym>[\[\](),;+\-*/])
    """,
    re.VERBOSE,
)


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise QasmSyntaxError("unexpected character", line, pos - line_start + 1, text[pos])
        kind = m.lastgroup
        chunk = m.group()
        if kind not in ("ws", "comment"):
            toks.append(_Tok(kind, chunk, line, pos - line_start + 1))
        nl = chunk.count("\n")
        if nl:
            line += nl
            line_start = pos + chunk.rindex("\n") + 1
        pos = m.end()
    return toks


_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv}


def _eval_param(expr: str) -> float:
    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        raise ValueError(expr)

    return ev(ast.parse(expr, mode="eval"))


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0
        self.qreg: tuple[str, int] | None = None
        self.creg: tuple[str, int] | None = None
        self.gates: list[Gate] = []

    def peek(self) -> _Tok | None:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def error(self, msg: str, tok: _Tok | None = None):
        tok = tok or self.peek()
        if tok is None:
            last = self.toks[-1] if self.toks else _Tok("eof", "", 1, 0)
            raise QasmSyntaxError(msg, last.line, last.col + len(last.text), "<eof>")
        raise QasmSyntaxError(msg, tok.line, tok.col, tok.text)

    def next(self, kind: str | None = None, text: str | None = None) -> _Tok:
        tok = self.peek()
        if tok is None or (kind and tok.kind != kind) or (text and tok.text != text):
            self.error(f"expected {text or kind}")
        self.i += 1
        return tok

    def parse(self) -> Circuit:
        tok = self.peek()
        if tok is not None and tok.text == "OPENQASM":
            self.next()
            self.next("number")
            self.next(text=";")
        while self.peek() is not None:
            self.statement()
        if self.qreg is None:
            raise QasmSyntaxError("missing qreg declaration", 1, 1, "<eof>")
        return Circuit(self.qreg[1], tuple(self.gates))

    def declaration(self, which: str):
        kw = self.next()
        name = self.next("ident").text
        self.next(text="[")
        size = int(self.next("number").text)
        self.next(text="]")
        self.next(text=";")
        if which == "qreg":
            if self.qreg is not None:
                self.error("only one quantum register is supported", kw)
            self.qreg = (name, size)
        else:
            if self.creg is not None:
                self.error("only one classical register is supported", kw)
            self.creg = (name, size)

    def qubit_ref(self) -> list[int]:
        name_tok = self.next("ident")
        if self.qreg is None or name_tok.text != self.qreg[0]:
            self.error("unknown quantum register", name_tok)
        if self.peek() is not None and self.peek().text == "[":
            self.next()
            idx_tok = self.next("number")
            self.next(text="]")
            idx = int(idx_tok.text)
            if idx >= self.qreg[1]:
                raise QubitOutOfRange(f"qubit {idx} out of range for {self.qreg[0]}[{self.qreg[1]}] "
                                      f"(line {idx_tok.line})")
            return [idx]
        return list(range(self.qreg[1]))

    def operand_list(self) -> list[int]:
        out = self.qubit_ref()
        while self.peek() is not None and self.peek().text == ",":
            self.next()
            out.extend(self.qubit_ref())
        return out

    def statement(self):
        tok = self.peek()
        if tok.kind != "ident":
            self.error("expected statement")
        word = tok.text
        if word in ("qreg", "creg"):
            self.declaration(word)
            return
        if word == "include":
            self.error("includes are not supported")
        if self.qreg is None:
            self.error("gate before qreg declaration")
        try:
            kind = GateKind(word)
        except ValueError:
            raise UnsupportedGate(word) from None
        self.next()
        param = None
        if kind is GateKind.RZ:
            self.next(text="(")
            start = self.i
            depth = 1
            while depth:
                t = self.next()
                depth += {"(": 1, ")": -1}.get(t.text, 0)
            expr = " ".join(t.text for t in self.toks[start:self.i - 1])
            try:
                param = _eval_param(expr)
            except (ValueError, SyntaxError, ZeroDivisionError):
                self.error("bad parameter expression", self.toks[start])
        operands = self.operand_list()
        if kind is GateKind.MEASURE and self.peek() is not None and self.peek().kind == "arrow":
            self.next()
            creg = self.next("ident")
            if self.creg is None or creg.text != self.creg[0]:
                self.error("unknown classical register", creg)
            if self.peek() is not None and self.peek().text == "[":
                self.next()
                self.next("number")
                self.next(text="]")
        self.next(text=";")
        n = len(self.gates)
        if kind is GateKind.MEASURE and len(operands) > 1:
            # `measure q -> c;` expands per qubit
            for q in operands:
                self.gates.append(Gate(len(self.gates), kind, (q,)))
            return
        try:
            self.gates.append(Gate(n, kind, tuple(operands), param))
        except ValueError as exc:
            self.error(str(exc), tok)


def parse_circuit(text: str) -> Circuit:
    """Parse OpenQASM-2 subset text (one qreg; x, h, rz, cz, swap, barrier, measure)."""
    return _Parser(text).parse()


def emit_circuit(c: Circuit) -> str:
    """Render a circuit as OpenQASM-2 subset text; inverse of :func:`parse_circuit`."""
    lines = ["OPENQASM 2.0;", f"qreg q[{c.num_qubits}];"]
    if any(g.kind is GateKind.MEASURE for g in c.gates):
        lines.append(f"creg c[{c.num_qubits}];")
    for g in c.gates:
        args = ",".join(f"q[{q}]" for q in g.operands)
        if g.kind is GateKind.RZ:
            lines.append(f"rz({g.param!r}) {args};")
        elif g.kind is GateKind.MEASURE:
            lines.append(f"measure {args} -> c[{g.operands[0]}];")
        else:
            lines.append(f"{g.kind.value} {args};")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Durations


@dataclass(frozen=True)
class DurationConfig:
    """Gate durations in nanoseconds. ``None`` marks a duration as not configured."""

    t_1q: float | None = 20.0
    t_cz: float | None = 40.0
    t_swap: float | None = 120.0
    t_measure: float | None = 500.0

    def for_kind(self, kind: GateKind) -> float:
        if kind is GateKind.BARRIER:
            return 0.0
        name = {GateKind.CZ: "t_cz", GateKind.SWAP: "t_swap", GateKind.MEASURE: "t_measure"}.get(kind, "t_1q")
        value = getattr(self, name)
        if value is None:
            raise MissingDuration(f"no duration configured for {kind.value} ({name})")
        return float(value)


def attach_durations(c: Circuit, cfg: DurationConfig) -> Circuit:
    gates = tuple(replace(g, duration=cfg.for_kind(g.kind)) for g in c.gates)
    return Circuit(c.num_qubits, gates)


# ---------------------------------------------------------------------------
# DAG


@dataclass(frozen=True)
class DagCircuit:
    num_qubits: int
    gates: tuple[Gate, ...]
    edges: tuple[tuple[int, int], ...]
    preds: tuple[tuple[int, ...], ...] = field(repr=False)
    succs: tuple[tuple[int, ...], ...] = field(repr=False)

    @property
    def qubits(self) -> range:
        return range(self.num_qubits)

    def circuit(self) -> Circuit:
        return Circuit(self.num_qubits, self.gates)

    def __len__(self) -> int:
        return len(self.gates)


def build_dag(c: Circuit) -> DagCircuit:
    """Dependency DAG: one edge from each gate's most recent predecessor on every operand."""
    last: dict[int, int] = {}
    preds: list[list[int]] = []
    succs: list[list[int]] = [[] for _ in c.gates]
    edges: list[tuple[int, int]] = []
    for idx, g in enumerate(c.gates):
        if g.id != idx:
            raise ValueError("gate ids must be dense and in statement order; call renumbered()")
        ps: list[int] = []
        for q in g.operands:
            p = last.get(q)
            if p is not None and p not in ps:
                ps.append(p)
            last[q] = idx
        ps.sort()
        preds.append(ps)
        for p in ps:
            succs[p].append(idx)
            edges.append((p, idx))
    return DagCircuit(
        c.num_qubits, c.gates, tuple(sorted(edges)),
        tuple(tuple(p) for p in preds), tuple(tuple(s) for s in succs),
    )


def top_layer(d: DagCircuit, executed: Iterable[int]) -> set[int]:
    """Unexecuted gates whose predecessors have all executed."""
    done = set(executed)
    for g in done:
        missing = [p for p in d.preds[g] if p not in done]
        if missing:
            raise NotDownwardClosed(f"gate {g} executed before predecessor(s) {missing}")
    return {g.id for g in d.gates if g.id not in done and all(p in done for p in d.preds[g.id])}


def topological_order(d: DagCircuit, key: Sequence | None = None) -> list[int]:
    """Kahn's algorithm; among ready gates pick the smallest ``key[g]`` (default: gate id)."""

    indeg = [len(p) for p in d.preds]
    k = key if key is not None else range(len(d.gates))
    heap = [(k[i], i) for i in range(len(d.gates)) if indeg[i] == 0]
    heapq.heapify(heap)
    out = []
    while heap:
        _, g = heapq.heappop(heap)
        out.append(g)
        for s in d.succs[g]:
            indeg[s] -= 1
            if indeg[s] == 0:
                heapq.heappush(heap, (k[s], s))
    if len(out) != len(d.gates):
        raise ValueError("dependency graph has a cycle")
    return out
