"""Built-in benchmark circuits, generated in-process from textbook constructions."""

from __future__ import annotations

import math
import random

from .circuit import Circuit, GateKind
from .errors import PatternMismatch, UnknownBenchmark


class _Builder:
    def __init__(self, n: int):
        self.n = n
        self.ops: list[tuple] = []

    def x(self, q):
        self.ops.append((GateKind.X, (q,)))

    def h(self, q):
        self.ops.append((GateKind.H, (q,)))

    def rz(self, theta, q):
        self.ops.append((GateKind.RZ, (q,), float(theta)))

    def rx(self, theta, q):
        self.h(q)
        self.rz(theta, q)
        self.h(q)

    def cz(self, a, b):
        self.ops.append((GateKind.CZ, (a, b)))

    def cx(self, c, t):
        self.h(t)
        self.cz(c, t)
        self.h(t)

    def cp(self, lam, c, t):
        """Controlled phase up to global phase."""
        self.rz(lam / 2, c)
        self.rz(lam / 2, t)
        self.cx(c, t)
        self.rz(-lam / 2, t)
        self.cx(c, t)

    def measure_all(self, qubits=None):
        for q in qubits if qubits is not None else range(self.n):
            self.ops.append((GateKind.MEASURE, (q,)))

    def build(self) -> Circuit:
        return Circuit.from_ops(self.n, self.ops)


def ghz(n: int) -> Circuit:
    b = _Builder(n)
    b.h(0)
    for q in range(n - 1):
        b.cx(q, q + 1)
    return b.build()


def qft(n: int) -> Circuit:
    """Quantum Fourier transform without the final qubit-reversal swaps."""
    b = _Builder(n)
    for j in range(n):
        b.h(j)
        for k in range(j + 1, n):
            b.cp(math.pi / 2 ** (k - j), k, j)
    return b.build()


def simon(n: int, seed: int = 0) -> Circuit:
    """Simon's algorithm on n/2 input + n/2 output qubits with a seeded non-zero secret."""
    if n < 2 or n % 2:
        raise ValueError("simon needs an even number of qubits >= 2")
    k = n // 2
    rng = random.Random(seed)
    secret = rng.randrange(1, 2 ** k)
    bits = [(secret >> i) & 1 for i in range(k)]
    b = _Builder(n)
    for i in range(k):
        b.h(i)
    for i in range(k):
        b.cx(i, k + i)
    pivot = bits.index(1)
    for i in range(k):
        if bits[i]:
            b.cx(pivot, k + i)
    for i in range(k):
        b.h(i)
    b.measure_all(range(k))
    return b.build()


def erdos_renyi_edges(n: int, p: float, seed: int) -> list[tuple[int, int]]:
    rng = random.Random(seed)
    return [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]


def qaoa(n: int, seed: int = 0, layers: int = 1, p_edge: float = 0.5) -> Circuit:
    """QAOA for MAX-CUT on a seeded Erdos-Renyi graph."""
    rng = random.Random(seed + 7919)
    edges = erdos_renyi_edges(n, p_edge, seed)
    b = _Builder(n)
    for q in range(n):
        b.h(q)
    for _ in range(layers):
        gamma, beta = rng.uniform(0, math.pi), rng.uniform(0, math.pi)
        for u, v in edges:
            b.cx(u, v)
            b.rz(2 * gamma, v)
            b.cx(u, v)
        for q in range(n):
            b.rx(2 * beta, q)
    return b.build()


def vqe_fragment(n: int, seed: int = 0, reps: int = 2) -> Circuit:
    """Hardware-efficient ansatz: RZ/RX rotations and a brick-wall CZ entangler."""
    rng = random.Random(seed)
    b = _Builder(n)
    for _ in range(reps):
        for q in range(n):
            b.rz(rng.uniform(-math.pi, math.pi), q)
            b.rx(rng.uniform(-math.pi, math.pi), q)
        for start in (0, 1):
            for q in range(start, n - 1, 2):
                b.cz(q, q + 1)
    return b.build()


# Entangling block of the worked 2x4 example: qubit q_i sits on physical Q_i, top row
# Q0..Q3 and bottom row Q4..Q7.  A full vertical CZ layer, a second round on the edge
# columns, then a horizontal pair inside the left 2x2 window.
WORKED_CZS = [(0, 4), (1, 5), (2, 6), (3, 7), (0, 4), (3, 7), (0, 1), (4, 5)]


def worked_fragment() -> Circuit:
    return Circuit.from_ops(8, [(GateKind.CZ, pair) for pair in WORKED_CZS])


WORKED_MAPPING = tuple(range(8))


# ---------------------------------------------------------------------------
# XEB


def grid_shape(n: int) -> tuple[int, int]:
    """Most square rows x cols factorisation of n with rows <= cols."""
    rows = max(r for r in range(1, int(math.isqrt(n)) + 1) if n % r == 0)
    return rows, n // rows


def coupler_pattern(letter: str, rows: int, cols: int) -> list[tuple[int, int]]:
    """Couplers switched on by one pattern letter.

    A-D stagger by checkerboard parity, E-H by plain row/column parity:
    A/B and E/F are horizontal, C/D and G/H vertical.
    """
    out = []
    for r in range(rows):
        for c in range(cols):
            q = r * cols + c
            horiz = c + 1 < cols
            vert = r + 1 < rows
            if letter == "A" and horiz and (r + c) % 2 == 0:
                out.append((q, q + 1))
            elif letter == "B" and horiz and (r + c) % 2 == 1:
                out.append((q, q + 1))
            elif letter == "C" and vert and (r + c) % 2 == 0:
                out.append((q, q + cols))
            elif letter == "D" and vert and (r + c) % 2 == 1:
                out.append((q, q + cols))
            elif letter == "E" and horiz and c % 2 == 0:
                out.append((q, q + 1))
            elif letter == "F" and horiz and c % 2 == 1:
                out.append((q, q + 1))
            elif letter == "G" and vert and r % 2 == 0:
                out.append((q, q + cols))
            elif letter == "H" and vert and r % 2 == 1:
                out.append((q, q + cols))
    return out


def gen_xeb(
    n: int, p: int, pattern: str = "ABCD", seed: int = 0, shape: tuple[int, int] | None = None,
) -> Circuit:
    """p cycles of random single-qubit gates on every qubit followed by one patterned CZ layer."""
    if p < 1:
        raise ValueError("need at least one cycle")
    rows, cols = shape if shape is not None else grid_shape(n)
    if rows * cols != n:
        raise PatternMismatch(f"{n} qubits do not fill a {rows}x{cols} placement")
    if not pattern or any(ch not in "ABCDEFGH" for ch in pattern):
        raise PatternMismatch(f"unknown coupler pattern {pattern!r}")
    layers = {ch: coupler_pattern(ch, rows, cols) for ch in set(pattern)}
    if all(not v for v in layers.values()):
        raise PatternMismatch(f"pattern {pattern!r} activates no coupler on a {rows}x{cols} grid")
    rng = random.Random(seed)
    b = _Builder(n)
    for cycle in range(p):
        for q in range(n):
            choice = rng.randrange(3)
            if choice == 0:
                b.x(q)
            elif choice == 1:
                b.h(q)
            else:
                b.rz(rng.uniform(-math.pi, math.pi), q)
        for a, c in layers[pattern[cycle % len(pattern)]]:
            b.cz(a, c)
    return b.build()


BENCHMARKS = ("simon", "qft", "qaoa", "vqe_fragment", "ghz", "xeb")


def make_benchmark(name: str, n: int, seed: int = 0, cycles: int = 5) -> Circuit:
    if name == "ghz":
        return ghz(n)
    if name == "qft":
        return qft(n)
    if name == "simon":
        return simon(n if n % 2 == 0 else n - 1, seed)
    if name == "qaoa":
        return qaoa(n, seed)
    if name == "vqe_fragment":
        return vqe_fragment(n, seed)
    if name == "xeb":
        return gen_xeb(n, cycles, seed=seed)
    raise UnknownBenchmark(f"unknown benchmark {name!r}; choose from {', '.join(BENCHMARKS)}")


def random_circuit(n: int, num_gates: int, seed: int, two_qubit_ratio: float = 0.5) -> Circuit:
    """Seeded random circuit over {x, h, rz, cz}."""
    rng = random.Random(seed)
    ops = []
    for _ in range(num_gates):
        if n >= 2 and rng.random() < two_qubit_ratio:
            a, b = rng.sample(range(n), 2)
            ops.append((GateKind.CZ, (a, b)))
        else:
            kind = rng.choice([GateKind.X, GateKind.H, GateKind.RZ])
            q = rng.randrange(n)
            ops.append((kind, (q,), rng.uniform(-math.pi, math.pi)) if kind is GateKind.RZ else (kind, (q,)))
    return Circuit.from_ops(n, ops)
