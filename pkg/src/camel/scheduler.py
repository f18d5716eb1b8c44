"""Gate scheduling: ASAP times, time-overlap layers, MIS-based crosstalk partitioning, barriers."""

from __future__ import annotations

import heapq
import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field, replace
from functools import lru_cache

from .chip import CouplingGraph, Window, windows_disjoint_far
from .circuit import Circuit, DagCircuit, Gate, GateKind, build_dag, topological_order
from .errors import CycleIntroduced, InvariantViolation
from .noise import mitigated

log = logging.getLogger(__name__)

EXACT_MIS_LIMIT = 20


@dataclass
class CrosstalkGraph:
    nodes: list[int]
    edges: set[tuple[int, int]] = field(default_factory=set)

    def adjacency(self) -> dict[int, set[int]]:
        adj = {v: set() for v in self.nodes}
        for a, b in self.edges:
            adj[a].add(b)
            adj[b].add(a)
        return adj

    def subgraph(self, keep: Iterable[int]) -> "CrosstalkGraph":
        keep = set(keep)
        return CrosstalkGraph(
            [v for v in self.nodes if v in keep],
            {e for e in self.edges if e[0] in keep and e[1] in keep},
        )


@dataclass(frozen=True)
class BarrierInfo:
    gate_id: int
    qubits: tuple[int, ...]
    before: tuple[int, ...]  # gate ids (final numbering) of sub-layer k
    after: tuple[int, ...]   # gate ids of sub-layer k + 1


@dataclass
class LayerPartition:
    layer: list[int]
    window_list: list[Window]
    graph: CrosstalkGraph
    sublayers: list[list[int]]


@dataclass
class Schedule:
    circuit: Circuit
    g_time: tuple[float, ...]
    t_end: float
    layers: list[list[int]] = field(default_factory=list)
    partitions: dict[int, int] = field(default_factory=dict)
    barriers: list[BarrierInfo] = field(default_factory=list)
    rounds: int = 0

    def finish(self, g: int) -> float:
        return self.g_time[g] + self.circuit.gates[g].duration

    @property
    def cz_depth(self) -> int:
        """Number of distinct start times among two-qubit gates."""
        return len({self.g_time[g.id] for g in self.circuit.gates if g.is_two_qubit})

    def to_json(self) -> dict:
        return {
            "t_end_ns": self.t_end,
            "gates": [
                {
                    "id": g.id, "start_ns": self.g_time[g.id], "duration_ns": g.duration, "kind": g.kind.value,
                    "physical_operands": list(g.operands), "sublayer": self.partitions.get(g.id, 0),
                }
                for g in self.circuit.gates if g.kind is not GateKind.BARRIER
            ],
            "barriers": [
                {"id": b.gate_id, "start_ns": self.g_time[b.gate_id], "qubits": list(b.qubits),
                 "before": list(b.before), "after": list(b.after)}
                for b in self.barriers
            ],
        }


# ---------------------------------------------------------------------------
# Timing and layers


def extract_gate_time(d: DagCircuit) -> tuple[tuple[float, ...], float]:
    """ASAP start times; a gate starts once every predecessor (hence every operand) is free."""
    start = [0.0] * len(d.gates)
    finish = [0.0] * len(d.gates)
    for g in topological_order(d):
        t = max((finish[p] for p in d.preds[g]), default=0.0)
        start[g] = t
        finish[g] = t + d.gates[g].duration
    return tuple(start), max(finish, default=0.0)


def _overlaps(a0: float, a1: float, b0: float, b1: float) -> bool:
    return a0 < b1 and b0 < a1


def build_layers(gates: Sequence[Gate], g_time: Sequence[float]) -> list[list[int]]:
    """First-fit by gate id: join the first layer holding a time-overlapping gate, else open one."""
    layers: list[list[int]] = []
    spans: list[list[tuple[float, float]]] = []
    for g in gates:
        if g.duration <= 0:
            continue
        s, e = g_time[g.id], g_time[g.id] + g.duration
        for layer, sp in zip(layers, spans):
            if any(_overlaps(s, e, a, b) for a, b in sp):
                layer.append(g.id)
                sp.append((s, e))
                break
        else:
            layers.append([g.id])
            spans.append([(s, e)])
    return layers


# ---------------------------------------------------------------------------
# Maximum independent set


def _exact_mis(nodes: list[int], adj: dict[int, set[int]]) -> list[int]:
    """Include-first branch and bound; returns the lexicographically first maximum set."""
    best: list[int] = []
    order = sorted(nodes)

    def rec(i: int, chosen: list[int], blocked: frozenset[int]):
        nonlocal best
        free = [v for v in order[i:] if v not in blocked]
        if len(chosen) + len(free) <= len(best):
            return
        if not free:
            best = list(chosen)
            return
        v = free[0]
        j = order.index(v)
        rec(j + 1, chosen + [v], blocked | adj[v])
        rec(j + 1, chosen, blocked | {v})

    rec(0, [], frozenset())
    return best


def _greedy_mis(nodes: list[int], adj: dict[int, set[int]]) -> list[int]:
    """Repeatedly take a minimum-degree vertex (lowest id on ties) and drop its neighbours."""
    alive = set(nodes)
    out = []
    while alive:
        v = min(alive, key=lambda x: (len(adj[x] & alive), x))
        out.append(v)
        alive -= adj[v] | {v}
    return sorted(out)


def max_independent_set(t: CrosstalkGraph, exact_limit: int = EXACT_MIS_LIMIT) -> set[int]:
    adj = t.adjacency()
    if len(t.nodes) <= exact_limit:
        return set(_exact_mis(t.nodes, adj))
    return set(_greedy_mis(t.nodes, adj))


# ---------------------------------------------------------------------------
# Partitioning


@lru_cache(maxsize=64)
def _far_table(chip: CouplingGraph, windows: tuple[Window, ...], threshold: int) -> tuple[tuple[bool, ...], ...]:
    D = chip.distances
    return tuple(tuple(windows_disjoint_far(a, b, D, threshold) for b in windows) for a in windows)


def select_window_list(
    gates: Sequence[Gate], chip: CouplingGraph, windows: Sequence[Window], far_threshold: int = 2,
) -> list[Window]:
    """Grow a list of mutually far windows from each seed covering a gate; keep the best coverage."""
    windows = tuple(windows)
    if not windows:
        return []
    far = _far_table(chip, windows, far_threshold)
    best: list[int] = []
    best_cov = -1
    useful = [i for i, w in enumerate(windows) if any(w.covers(g.operands) for g in gates)]
    for i in useful:
        chosen = [i]
        for j in useful:
            if j not in chosen and all(far[j][k] for k in chosen):
                chosen.append(j)
        cov = 2 * sum(1 for g in gates if any(windows[k].covers(g.operands) for k in chosen))
        if cov > best_cov:
            best, best_cov = chosen, cov
    return [windows[k] for k in best]


def crosstalk_graph(
    gates: Sequence[Gate], chip: CouplingGraph, window_list: Sequence[Window],
    g_time: Sequence[float] | None = None,
) -> CrosstalkGraph:
    """Edge when a coupler still joins two gates after removing couplers inside a shared window.

    Gates sharing a qubit also conflict: they can never run side by side.  With
    ``g_time`` only pairs whose execution intervals overlap are considered, since a
    long gate can pull non-overlapping gates into one layer.
    """
    t = CrosstalkGraph([g.id for g in gates])
    for i, a in enumerate(gates):
        for b in gates[i + 1:]:
            if g_time is not None and not _overlaps(
                g_time[a.id], g_time[a.id] + a.duration, g_time[b.id], g_time[b.id] + b.duration,
            ):
                continue
            if set(a.operands) & set(b.operands):
                t.edges.add((a.id, b.id))
                continue
            if not any(chip.coupled(x, y) for x in a.operands for y in b.operands):
                continue
            if any(w.covers(a.operands + b.operands) for w in window_list):
                continue
            t.edges.add((a.id, b.id))
    return t


def _layer_ancestors(d: DagCircuit, members: set[int], g_time: Sequence[float]) -> dict[int, set[int]]:
    """For each member, the other members it (transitively) depends on."""
    t0 = min(g_time[g] for g in members)
    out = {}
    for g in members:
        seen: set[int] = set()
        stack = list(d.preds[g])
        while stack:
            p = stack.pop()
            if p in seen or g_time[p] < t0:
                continue
            seen.add(p)
            stack.extend(d.preds[p])
        out[g] = seen & members
    return out


def partition_layer(
    layer: Sequence[int], d: DagCircuit, g_time: Sequence[float], chip: CouplingGraph,
    windows: Sequence[Window], far_threshold: int = 2, exact_limit: int = EXACT_MIS_LIMIT,
) -> LayerPartition:
    twoq = [d.gates[g] for g in layer if d.gates[g].is_two_qubit]
    wl = select_window_list(twoq, chip, windows, far_threshold) if len(twoq) > 1 else []
    graph = crosstalk_graph(twoq, chip, wl, g_time)
    remaining = {g.id for g in twoq}
    if not graph.edges:
        # nothing to separate; dependencies inside the layer already order it
        return LayerPartition(list(layer), wl, graph, [sorted(remaining)] if remaining else [])
    anc = _layer_ancestors(d, remaining, g_time) if len(remaining) > 1 else {g: set() for g in remaining}
    sublayers: list[list[int]] = []
    while remaining:
        ready = [g for g in remaining if not (anc[g] & remaining)]
        chosen = max_independent_set(graph.subgraph(ready), exact_limit)
        sublayers.append(sorted(chosen))
        remaining -= chosen
    return LayerPartition(list(layer), wl, graph, sublayers)


def generate_partition(
    layers: Sequence[Sequence[int]], d: DagCircuit, g_time: Sequence[float], chip: CouplingGraph,
    windows: Sequence[Window], far_threshold: int = 2,
) -> tuple[dict[int, int], list[LayerPartition]]:
    """Sub-layer index for every gate in every layer (single-qubit gates stay in sub-layer 0)."""
    partitions: dict[int, int] = {}
    details = []
    for layer in layers:
        lp = partition_layer(layer, d, g_time, chip, windows, far_threshold)
        for g in layer:
            partitions[g] = 0
        for k, sub in enumerate(lp.sublayers):
            for g in sub:
                partitions[g] = k
        details.append(lp)
    return partitions, details


# ---------------------------------------------------------------------------
# Barriers


def insert_barriers(
    d: DagCircuit, splits: Sequence[Sequence[Sequence[int]]], g_time: Sequence[float],
) -> tuple[Circuit, list[tuple[int | None, ...]], list[tuple[int, tuple[int, ...], tuple[int, ...]]]]:
    """Insert one barrier between consecutive sub-layers of every split layer.

    ``splits`` holds, per layer, its ordered sub-layers of gate ids.  Returns the
    relinearised circuit, ``origin[new_id] -> old id`` (None for new barriers)
    and, per barrier, ``(new id, before-ids, after-ids)`` in new numbering.
    """
    n = len(d.gates)
    preds: list[list[int]] = [list(p) for p in d.preds]
    key: list[tuple] = [(g_time[g], 1, g) for g in range(n)]
    barrier_qubits: list[tuple[int, ...]] = []
    barrier_sides: list[tuple[tuple[int, ...], tuple[int, ...]]] = []
    for subs in splits:
        for before, after in zip(subs, subs[1:]):
            b = n + len(barrier_qubits)
            qubits = tuple(sorted({q for g in (*before, *after) for q in d.gates[g].operands}))
            barrier_qubits.append(qubits)
            barrier_sides.append((tuple(before), tuple(after)))
            preds.append(list(before))
            for g in after:
                preds[g].append(b)
            key.append((min(g_time[g] for g in after), 0, b))

    total = len(preds)
    succs: list[list[int]] = [[] for _ in range(total)]
    indeg = [0] * total
    for v, ps in enumerate(preds):
        for p in ps:
            succs[p].append(v)
            indeg[v] += 1

    heap = [key[v] for v in range(total) if indeg[v] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        v = heapq.heappop(heap)[2]
        order.append(v)
        for s in succs[v]:
            indeg[s] -= 1
            if indeg[s] == 0:
                heapq.heappush(heap, key[s])
    if len(order) != total:
        raise CycleIntroduced("barrier placement contradicts existing gate dependencies")

    new_id = {v: i for i, v in enumerate(order)}
    gates = []
    origin: list[int | None] = []
    for i, v in enumerate(order):
        if v < n:
            gates.append(replace(d.gates[v], id=i))
            origin.append(v)
        else:
            gates.append(Gate(i, GateKind.BARRIER, barrier_qubits[v - n], None, 0.0))
            origin.append(None)
    info = [
        (new_id[n + k], tuple(new_id[g] for g in bef), tuple(new_id[g] for g in aft))
        for k, (bef, aft) in enumerate(barrier_sides)
    ]
    return Circuit(d.num_qubits, tuple(gates)), origin, info


def _cross_layer_conflicts(
    d: DagCircuit, g_time: Sequence[float], layer_of: dict[int, int] | None, chip: CouplingGraph,
    windows: Sequence[Window],
) -> list[tuple[int, int]]:
    """Overlapping, coupled two-qubit gates sitting in different layers with no shared window."""
    twoq = [g for g in d.gates if g.is_two_qubit]
    out = []
    for i, a in enumerate(twoq):
        a0, a1 = g_time[a.id], g_time[a.id] + a.duration
        for b in twoq[i + 1:]:
            if layer_of is not None and layer_of.get(a.id) == layer_of.get(b.id):
                continue
            if not _overlaps(a0, a1, g_time[b.id], g_time[b.id] + b.duration):
                continue
            if not any(chip.coupled(x, y) for x in a.operands for y in b.operands):
                continue
            if mitigated(a.operands, b.operands, windows):
                continue
            first, second = sorted((a, b), key=lambda g: (g_time[g.id], g.id))
            out.append((first.id, second.id))
    return out


def schedule(
    d: DagCircuit, chip: CouplingGraph, windows: Sequence[Window] = (), *,
    far_threshold: int = 2, partition: bool = True, max_rounds: int | None = None,
) -> Schedule:
    """Crosstalk-aware schedule of a physically mapped DAG.

    Each round extracts ASAP times, layers them, partitions every layer and
    inserts barriers; rounds repeat until no layer needs splitting, because
    delaying one sub-layer can slide later gates into new overlaps.
    ``partition=False`` gives the plain ASAP schedule.
    """
    if d.gates and d.num_qubits > chip.num_qubits:
        raise ValueError("schedule expects a circuit on the chip's physical qubits")
    g_time, t_end = extract_gate_time(d)
    if not partition:
        return Schedule(d.circuit(), g_time, t_end, build_layers(d.gates, g_time), {}, [], 0)

    # origin[i] = id in the caller's numbering for gate i of the current round
    origin: list[int | None] = list(range(len(d.gates)))
    first_parts: dict[int, int] | None = None
    barrier_log: list[tuple[int, tuple[int, ...], tuple[int, ...]]] = []  # in current numbering
    rounds = 0
    limit = max_rounds if max_rounds is not None else len(d.gates) + 2
    while True:
        layers = build_layers(d.gates, g_time)
        parts, details = generate_partition(layers, d, g_time, chip, windows, far_threshold)
        if first_parts is None:
            first_parts = {origin[g]: k for g, k in parts.items()}
        splits = [lp.sublayers for lp in details if len(lp.sublayers) > 1]
        if not splits:
            layer_of = {g: i for i, layer in enumerate(layers) for g in layer}
            splits = [[[a], [b]] for a, b in _cross_layer_conflicts(d, g_time, layer_of, chip, windows)]
            if not splits:
                break
        rounds += 1
        if rounds > limit:
            raise InvariantViolation(f"scheduling did not converge after {limit} rounds")
        circ, step_origin, info = insert_barriers(d, splits, g_time)
        remap = {old: new for new, old in enumerate(step_origin) if old is not None}
        barrier_log = [
            (remap[b], tuple(remap[x] for x in bef), tuple(remap[x] for x in aft))
            for b, bef, aft in barrier_log
        ] + info
        origin = [origin[o] if o is not None else None for o in step_origin]
        d = build_dag(circ)
        g_time, t_end = extract_gate_time(d)
        log.debug("scheduling round %d: %d barriers, t_end=%g", rounds, len(info), t_end)

    partitions = {}
    for new, old in enumerate(origin):
        if old is not None and d.gates[new].kind is not GateKind.BARRIER:
            partitions[new] = first_parts.get(old, 0)
    barriers = [
        BarrierInfo(b, d.gates[b].operands, bef, aft) for b, bef, aft in sorted(barrier_log)
    ]
    return Schedule(d.circuit(), g_time, t_end, build_layers(d.gates, g_time), partitions, barriers, rounds)


def validate_schedule(
    s: Schedule, chip: CouplingGraph, windows: Sequence[Window] = (), *, check_crosstalk: bool = True,
) -> list[str]:
    """Human-readable list of violated schedule invariants (empty when valid)."""
    problems = []
    d = build_dag(s.circuit)
    for a, b in d.edges:
        if s.g_time[b] < s.finish(a) - 1e-9:
            problems.append(f"gate {b} starts before predecessor {a} finishes")
    busy: dict[int, list[tuple[float, float, int]]] = {}
    for g in s.circuit.gates:
        if g.duration > 0:
            for q in g.operands:
                busy.setdefault(q, []).append((s.g_time[g.id], s.finish(g.id), g.id))
    for q, spans in busy.items():
        spans.sort()
        for (a0, a1, ga), (b0, b1, gb) in zip(spans, spans[1:]):
            if b0 < a1 - 1e-9:
                problems.append(f"gates {ga} and {gb} overlap on qubit {q}")
    if check_crosstalk:
        for a, b in _cross_layer_conflicts(d, s.g_time, None, chip, windows):
            problems.append(f"gates {a} and {b} run in parallel with unmitigated crosstalk")
    return problems
