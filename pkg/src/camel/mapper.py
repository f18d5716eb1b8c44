"""Crosstalk-aware qubit mapping with lookahead SWAP insertion.

The driver repeatedly asks :func:`search_forward` for the next batch of
executable gates (plus any SWAPs chosen by the depth-``L``/width-``W``
lookahead), commits them to the output and updates the running mapping.
Candidate batches are ranked by :func:`score_step`, which packs the batch
into time-overlapping layers and delays any gate whose layer would break
the window-diameter constraint.
"""

from __future__ import annotations

import logging
import random
from collections import deque
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, replace
from typing import NamedTuple, Union

from .chip import CouplingGraph, DistanceMatrix
from .circuit import Circuit, DagCircuit, DurationConfig, Gate, GateKind, build_dag
from .errors import CircuitTooLarge, NoProgress

log = logging.getLogger(__name__)

MAX_DEPTH = 4
MAX_WIDTH = 16


@dataclass(frozen=True)
class Mapping:
    """Logical -> physical assignment; ``inverse[p]`` is -1 for unused physical qubits."""

    forward: tuple[int, ...]
    inverse: tuple[int, ...]

    @classmethod
    def from_forward(cls, forward: Sequence[int], num_physical: int) -> "Mapping":
        inv = [-1] * num_physical
        for l, p in enumerate(forward):
            if inv[p] != -1:
                raise ValueError(f"physical qubit {p} assigned twice")
            inv[p] = l
        return cls(tuple(forward), tuple(inv))

    @classmethod
    def trivial(cls, num_logical: int, num_physical: int) -> "Mapping":
        return cls.from_forward(range(num_logical), num_physical)

    @classmethod
    def random(cls, num_logical: int, num_physical: int, seed: int) -> "Mapping":
        rng = random.Random(seed)
        return cls.from_forward(rng.sample(range(num_physical), num_logical), num_physical)

    def __call__(self, q: int) -> int:
        return self.forward[q]

    def swapped(self, a: int, b: int) -> "Mapping":
        """Mapping after a SWAP on physical qubits ``a`` and ``b``."""
        inv = list(self.inverse)
        inv[a], inv[b] = inv[b], inv[a]
        fwd = list(self.forward)
        if inv[a] != -1:
            fwd[inv[a]] = a
        if inv[b] != -1:
            fwd[inv[b]] = b
        return Mapping(tuple(fwd), tuple(inv))

    def mapped(self, p: int) -> bool:
        return self.inverse[p] != -1


class Swap(NamedTuple):
    """A SWAP on a physical coupler inside a candidate gate list."""

    a: int
    b: int


Item = Union[int, Swap]  # original gate id, or an inserted SWAP


@dataclass(frozen=True)
class SearchParams:
    depth: int = 2  # L
    width: int = 4  # W
    swap_penalty: float = 3.0
    seed: int = 0
    initial: str = "random"  # or "trivial"
    parallel_constraint: bool = True
    count_swaps_as_executed: bool = True
    max_depth: int = MAX_DEPTH
    max_width: int = MAX_WIDTH
    stall_limit: int | None = None  # iterations without progress before NoProgress; default 10*|Q|

    def __post_init__(self):
        if not 0 <= self.depth <= self.max_depth:
            raise ValueError(f"search depth must lie in [0, {self.max_depth}]")
        if not 1 <= self.width <= self.max_width:
            raise ValueError(f"search width must lie in [1, {self.max_width}]")
        if self.initial not in ("random", "trivial"):
            raise ValueError("initial mapping must be 'random' or 'trivial'")


@dataclass(frozen=True)
class SwapCandidate:
    edge: tuple[int, int]
    d: int
    index: int


class Context:
    """Everything the search needs besides the mapping and the executed set."""

    def __init__(
        self,
        chip: CouplingGraph,
        dag: DagCircuit,
        durations: DurationConfig,
        diameter_bound: int,
        params: SearchParams,
    ):
        self.chip = chip
        self.D: DistanceMatrix = chip.distances
        self.dag = dag
        self.durations = durations
        self.diameter_bound = diameter_bound
        self.params = params
        self.t_swap = durations.for_kind(GateKind.SWAP)


# ---------------------------------------------------------------------------
# Scoring


def _overlaps(a0: float, a1: float, b0: float, b1: float) -> bool:
    return a0 < b1 and b0 < a1


def _component_diameters_ok(chip: CouplingGraph, gate_qubits: list[tuple[int, ...]], bound: int) -> bool:
    """Parallel constraint on the subgraph induced by the qubits of simultaneous 2q gates.

    A component made of a single gate is always allowed (that gate alone needs no window).
    """
    owner: dict[int, int] = {}
    for i, qs in enumerate(gate_qubits):
        for q in qs:
            owner[q] = i
    seen: set[int] = set()
    for start in owner:
        if start in seen:
            continue
        comp = []
        queue = deque([start])
        seen.add(start)
        while queue:
            u = queue.popleft()
            comp.append(u)
            for v in chip.neighbors[u]:
                if v in owner and v not in seen:
                    seen.add(v)
                    queue.append(v)
        if len({owner[q] for q in comp}) < 2:
            continue
        if bound < 0 or _induced_diameter(chip, comp) > bound:
            return False
    return True


def _induced_diameter(chip: CouplingGraph, nodes: list[int]) -> int:
    inside = set(nodes)
    best = 0
    for src in nodes:
        dist = {src: 0}
        queue = deque([src])
        while queue:
            u = queue.popleft()
            for v in chip.neighbors[u]:
                if v in inside and v not in dist:
                    dist[v] = dist[u] + 1
                    queue.append(v)
        best = max(best, max(dist.values()))
    return best


def score_step(pi: Mapping, g_exc: Sequence[Item], ctx: Context) -> float:
    """(executed - penalty * swaps) / t_end for a greedy crosstalk-aware layer packing of ``g_exc``."""
    gates = ctx.dag.gates
    clock: dict[int, float] = {}
    layers: list[list[tuple[float, float, tuple[int, ...], bool]]] = []
    n_swaps = 0
    n_exec = 0
    for item in g_exc:
        if isinstance(item, Swap):
            pi = pi.swapped(item.a, item.b)
            phys = (item.a, item.b)
            dur = ctx.t_swap
            two_q = True
            n_swaps += 1
            if ctx.params.count_swaps_as_executed:
                n_exec += 1
        else:
            gate = gates[item]
            if gate.kind in (GateKind.BARRIER, GateKind.MEASURE):
                continue
            phys = tuple(pi(q) for q in gate.operands)
            dur = gate.duration
            two_q = gate.is_two_qubit
            n_exec += 1
        start = max(clock.get(p, 0.0) for p in phys)
        placed = False
        for layer in layers:
            if not any(_overlaps(start, start + dur, m0, m1) for m0, m1, _, _ in layer):
                continue
            if (not ctx.params.parallel_constraint or not two_q or _component_diameters_ok(
                    ctx.chip, [qs for _, _, qs, tq in layer if tq] + [phys], ctx.diameter_bound)):
                layer.append((start, start + dur, phys, two_q))
                for p in phys:
                    clock[p] = start + dur
                placed = True
                break
            start = max(start, max(clock.get(p, 0.0) for _, _, qs, _ in layer for p in qs))
            for p in phys:
                clock[p] = start
        if not placed:
            t = max(clock.values(), default=0.0)
            layers.append([(t, t + dur, phys, two_q)])
            for p in phys:
                clock[p] = t + dur
    t_end = max(clock.values(), default=0.0)
    if t_end <= 0:
        return 0.0
    return (n_exec - ctx.params.swap_penalty * n_swaps) / t_end


# ---------------------------------------------------------------------------
# Search


class Frontier:
    """Executed-set bookkeeping for the driver; lookahead layers an overlay on top."""

    def __init__(self, dag: DagCircuit):
        self.dag = dag
        self.indeg = [len(p) for p in dag.preds]
        self.done: set[int] = set()
        self.front: set[int] = {i for i, k in enumerate(self.indeg) if k == 0}

    def execute(self, g: int):
        self.done.add(g)
        self.front.discard(g)
        for s in self.dag.succs[g]:
            self.indeg[s] -= 1
            if self.indeg[s] == 0:
                self.front.add(s)

    def top_layer(self, extra: frozenset[int] = frozenset()) -> set[int]:
        if not extra:
            return set(self.front)
        F = self.front - extra
        for x in extra:
            for s in self.dag.succs[x]:
                if s in extra or s in F:
                    continue
                if all(p in self.done or p in extra for p in self.dag.preds[s]):
                    F.add(s)
        return F

    @property
    def finished(self) -> bool:
        return len(self.done) == len(self.dag.gates)


def executable(gate: Gate, pi: Mapping, chip: CouplingGraph) -> bool:
    """Coupler connection constraint: two-qubit gates need coupled physical operands."""
    if not gate.is_two_qubit:
        return True
    a, b = gate.operands
    return chip.coupled(pi(a), pi(b))


def swap_candidates(
    pi: Mapping, F: Iterable[int], dag: DagCircuit, D: DistanceMatrix, chip: CouplingGraph,
) -> list[SwapCandidate]:
    """One candidate per coupler touching a mapped qubit, by (summed top-layer distance, coupler index)."""
    pairs = [dag.gates[g].operands for g in sorted(F) if dag.gates[g].is_two_qubit]
    out = []
    for idx, (a, b) in enumerate(chip.edges):
        if not (pi.mapped(a) or pi.mapped(b)):
            continue
        nxt = pi.swapped(a, b)
        d = sum(D(nxt(q1), nxt(q2)) for q1, q2 in pairs)
        out.append(SwapCandidate((a, b), d, idx))
    out.sort(key=lambda c: (c.d, c.index))
    return out


def search_forward(
    pi: Mapping, frontier: Frontier, L: int, W: int, ctx: Context,
    extra: frozenset[int] = frozenset(),
) -> list[Item]:
    """Executable top-layer gates, followed by the best-scoring SWAP + recursive continuation."""
    dag = ctx.dag
    F = frontier.top_layer(extra)
    g_exc: list[Item] = [g for g in sorted(F) if executable(dag.gates[g], pi, ctx.chip)]
    if L == 0:
        return g_exc
    if all(executable(dag.gates[g], pi, ctx.chip) for g in F):
        return g_exc
    remaining = extra | frozenset(g_exc)
    best: list[Item] = []
    best_score = float("-inf")
    for cand in swap_candidates(pi, F, dag, ctx.D, ctx.chip)[:W]:
        s = Swap(*cand.edge)
        nxt = pi.swapped(s.a, s.b)
        g_exc2 = search_forward(nxt, frontier, L - 1, W, ctx, remaining)
        score = score_step(pi, g_exc + [s] + g_exc2, ctx)
        if score > best_score:
            best_score = score
            best = [s] + g_exc2
    return g_exc + best


def _release_route(pi: Mapping, frontier: Frontier, ctx: Context) -> list[Item]:
    """Walk the lowest-id blocked gate's first operand along a shortest path to its partner."""
    dag, D, chip = ctx.dag, ctx.D, ctx.chip
    blocked = sorted(g for g in frontier.front if not executable(dag.gates[g], pi, chip))
    a, b = dag.gates[blocked[0]].operands
    pa, pb = pi(a), pi(b)
    path: list[Item] = []
    while D(pa, pb) > 1:
        step = min(v for v in chip.neighbors[pa] if D(v, pb) == D(pa, pb) - 1)
        path.append(Swap(min(pa, step), max(pa, step)))
        pa = step
    return path


class MapResult(NamedTuple):
    dag: DagCircuit
    initial: Mapping
    final: Mapping


def camel_map(
    chip: CouplingGraph,
    d: DagCircuit,
    p: SearchParams = SearchParams(),
    *,
    durations: DurationConfig = DurationConfig(),
    window: tuple[int, int] = (2, 2),
    initial: Mapping | None = None,
) -> MapResult:
    """Route ``d`` onto ``chip``; the output DAG is expressed on physical qubits."""
    nq = chip.num_qubits
    if d.num_qubits > nq:
        raise CircuitTooLarge(f"circuit needs {d.num_qubits} qubits, chip has {nq}")
    if initial is None:
        if p.initial == "trivial":
            initial = Mapping.trivial(d.num_qubits, nq)
        else:
            initial = Mapping.random(d.num_qubits, nq, p.seed)
    elif len(initial.forward) != d.num_qubits or len(initial.inverse) != nq:
        raise ValueError("initial mapping does not match circuit/chip sizes")

    m, n = window
    ctx = Context(chip, d, durations, m + n - 2, p)
    frontier = Frontier(d)
    pi = initial
    out: list[Gate] = []
    stall_limit = p.stall_limit if p.stall_limit is not None else 10 * nq
    release_after = max(2, nq)
    stalled = 0

    def emit(item: Item):
        nonlocal pi
        if isinstance(item, Swap):
            out.append(Gate(len(out), GateKind.SWAP, (item.a, item.b), None, ctx.t_swap))
            pi = pi.swapped(item.a, item.b)
            return False
        gate = d.gates[item]
        phys = tuple(pi(q) for q in gate.operands)
        if gate.is_two_qubit and not chip.coupled(*phys):
            raise AssertionError(f"gate {item} emitted on uncoupled qubits {phys}")
        out.append(replace(gate, id=len(out), operands=phys))
        frontier.execute(item)
        return True

    while not frontier.finished:
        items = search_forward(pi, frontier, p.depth, p.width, ctx)
        released = False
        if stalled >= release_after or not items:
            log.debug("release valve after %d stalled iterations", stalled)
            items = _release_route(pi, frontier, ctx)
            released = True
        progressed = False
        for item in items:
            progressed |= emit(item)
        stalled = 0 if progressed or released else stalled + 1
        if stalled > stall_limit:
            raise NoProgress(
                f"no gate executed in {stalled} iterations; top layer {sorted(frontier.front)}, "
                f"mapping {pi.forward}"
            )
    return MapResult(build_dag(Circuit(nq, tuple(out))), initial, pi)


def validate_routing(c: Circuit, chip: CouplingGraph) -> list[int]:
    """Ids of two-qubit gates of a physical circuit that sit on uncoupled qubits."""
    return [g.id for g in c.gates if g.is_two_qubit and not chip.coupled(*g.operands)]


def swap_permutation(c: Circuit) -> list[int]:
    """Where each physical qubit's content ends up after the circuit's SWAPs: ``perm[src] = dst``."""
    where = list(range(c.num_qubits))  # where[p] = original owner of the state now on p
    for g in c.gates:
        if g.kind is GateKind.SWAP:
            a, b = g.operands
            where[a], where[b] = where[b], where[a]
    perm = [0] * c.num_qubits
    for p, src in enumerate(where):
        perm[src] = p
    return perm
