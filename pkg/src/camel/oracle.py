"""Brute-force references used by the test-suite.

Everything here is deliberately naive and independent of the code paths it
checks: bitmask searches instead of the scheduler's branch and bound, dense
matrices instead of the simulator's tensor contractions.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterable, Sequence

import numpy as np

from .circuit import Circuit, GateKind
from .errors import TooLarge


def _adjmask(nodes: Sequence[int], edges: Iterable[tuple[int, int]]) -> tuple[list[int], list[int]]:
    nodes = sorted(nodes)
    pos = {v: i for i, v in enumerate(nodes)}
    adj = [0] * len(nodes)
    for a, b in edges:
        adj[pos[a]] |= 1 << pos[b]
        adj[pos[b]] |= 1 << pos[a]
    return nodes, adj


def exact_mis(nodes: Sequence[int], edges: Iterable[tuple[int, int]]) -> set[int]:
    """Maximum independent set by pivoting on the highest-degree vertex (degree <= 1 vertices are taken)."""
    if len(nodes) > 30:
        raise TooLarge(f"exact MIS limited to 30 nodes, got {len(nodes)}")
    nodes, adj = _adjmask(nodes, edges)

    def solve(mask: int) -> int:
        if not mask:
            return 0
        best_v, best_deg = -1, -1
        m = mask
        while m:
            v = (m & -m).bit_length() - 1
            m &= m - 1
            deg = bin(adj[v] & mask).count("1")
            if deg <= 1:
                return (1 << v) | solve(mask & ~(1 << v) & ~adj[v])
            if deg > best_deg:
                best_v, best_deg = v, deg
        v = best_v
        take = (1 << v) | solve(mask & ~(1 << v) & ~adj[v])
        skip = solve(mask & ~(1 << v))
        return take if bin(take).count("1") >= bin(skip).count("1") else skip

    result = solve((1 << len(nodes)) - 1)
    return {nodes[i] for i in range(len(nodes)) if result >> i & 1}


def is_independent(chosen: Iterable[int], edges: Iterable[tuple[int, int]]) -> bool:
    chosen = set(chosen)
    return not any(a in chosen and b in chosen for a, b in edges)


def is_maximal(chosen: Iterable[int], nodes: Iterable[int], edges: Iterable[tuple[int, int]]) -> bool:
    chosen = set(chosen)
    nbrs: dict[int, set[int]] = {}
    for a, b in edges:
        nbrs.setdefault(a, set()).add(b)
        nbrs.setdefault(b, set()).add(a)
    return all(v in chosen or nbrs.get(v, set()) & chosen for v in nodes)


def min_is_cover(nodes: Sequence[int], edges: Iterable[tuple[int, int]]) -> int:
    """Chromatic number: fewest independent sets covering every node (exhaustive over k)."""
    if len(nodes) > 12:
        raise TooLarge(f"min_is_cover limited to 12 nodes, got {len(nodes)}")
    if not nodes:
        return 0
    nodes, adj = _adjmask(nodes, edges)
    n = len(nodes)
    full = (1 << n) - 1
    independent = [
        s for s in range(1, full + 1)
        if all(not (adj[v] & s) for v in range(n) if s >> v & 1)
    ]
    # smallest k with k independent sets whose union is everything
    reach = {0}
    for k in range(1, n + 1):
        reach = {r | s for r in reach for s in independent}
        if full in reach:
            return k
    return n


def count_matchings(g) -> int:
    """Number of matchings (edge subsets with no shared endpoint), empty one included.

    ``g`` is a :class:`~camel.chip.CouplingGraph` or a plain edge list.
    """
    edges = list(getattr(g, "edges", g))
    if len(edges) > 20:
        raise TooLarge(f"count_matchings limited to 20 edges, got {len(edges)}")

    def rec(es: list[tuple[int, int]]) -> int:
        if not es:
            return 1
        (a, b), rest = es[0], es[1:]
        without = rec(rest)
        with_e = rec([e for e in rest if a not in e and b not in e])
        return without + with_e

    return rec(edges)


def count_matchings_bruteforce(edges: Sequence[tuple[int, int]]) -> int:
    """Enumerate every edge subset; only for tiny graphs."""
    total = 0
    for r in range(len(edges) + 1):
        for combo in itertools.combinations(edges, r):
            ends = [q for e in combo for q in e]
            total += len(ends) == len(set(ends))
    return total


# ---------------------------------------------------------------------------
# Unitary equivalence

_SQ2 = 1 / np.sqrt(2)


def _one_qubit(kind: GateKind, param: float | None) -> np.ndarray:
    if kind is GateKind.X:
        return np.array([[0, 1], [1, 0]], dtype=complex)
    if kind is GateKind.H:
        return np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=complex)
    return np.diag([np.exp(-0.5j * param), np.exp(0.5j * param)])


def _embed_1q(u: np.ndarray, q: int, n: int) -> np.ndarray:
    out = np.array([[1.0 + 0j]])
    for k in range(n):
        out = np.kron(out, u if k == q else np.eye(2))
    return out


def _basis_perm(n: int, f) -> np.ndarray:
    """Permutation matrix sending basis state bits -> f(bits); qubit 0 is the most significant bit."""
    dim = 1 << n
    p = np.zeros((dim, dim))
    for x in range(dim):
        bits = [(x >> (n - 1 - k)) & 1 for k in range(n)]
        y_bits = f(bits)
        y = 0
        for b in y_bits:
            y = (y << 1) | b
        p[y, x] = 1
    return p


def circuit_unitary(c: Circuit, n: int | None = None) -> np.ndarray:
    """Dense unitary of ``c`` on ``n`` qubits (default ``c.num_qubits``); barriers/measures ignored."""
    n = c.num_qubits if n is None else n
    if n > 10:
        raise TooLarge(f"dense unitary limited to 10 qubits, got {n}")
    dim = 1 << n
    u = np.eye(dim, dtype=complex)
    for g in c.gates:
        if g.kind in (GateKind.BARRIER, GateKind.MEASURE):
            continue
        if g.kind is GateKind.CZ:
            a, b = g.operands
            diag = np.array([
                -1 if ((x >> (n - 1 - a)) & 1 and (x >> (n - 1 - b)) & 1) else 1 for x in range(dim)
            ])
            u = diag[:, None] * u
        elif g.kind is GateKind.SWAP:
            a, b = g.operands

            def sw(bits, a=a, b=b):
                bits = list(bits)
                bits[a], bits[b] = bits[b], bits[a]
                return bits

            u = _basis_perm(n, sw) @ u
        else:
            u = _embed_1q(_one_qubit(g.kind, g.param), g.operands[0], n) @ u
    return u


def permutation_matrix(perm: Sequence[int]) -> np.ndarray:
    """Operator moving the state of qubit ``i`` onto qubit ``perm[i]``."""
    n = len(perm)

    def f(bits):
        out = [0] * n
        for i, b in enumerate(bits):
            out[perm[i]] = b
        return out

    return _basis_perm(n, f).astype(complex)


def _phase_aligned_distance(a: np.ndarray, b: np.ndarray) -> float:
    idx = np.unravel_index(np.argmax(np.abs(b)), b.shape)
    if abs(a[idx]) < 1e-12:
        return float(np.max(np.abs(a - b)))
    phase = b[idx] / a[idx]
    phase /= abs(phase)
    return float(np.max(np.abs(a * phase - b)))


def unitary_equiv(original: Circuit, compiled: Circuit, perm: Sequence[int], tol: float = 1e-9) -> bool:
    """Compiled unitary equals ``P_perm @ U_original`` up to global phase.

    ``compiled`` must already be relabelled so that its qubit ``i`` starts out
    holding logical qubit ``i``; extra compiled qubits are idle ancillas.
    """
    n = compiled.num_qubits
    if n > 8:
        raise TooLarge(f"unitary equivalence limited to 8 qubits, got {n}")
    if len(perm) != n:
        raise ValueError("permutation size must match the compiled register")
    u_orig = circuit_unitary(original, n)
    u_comp = circuit_unitary(compiled, n)
    return _phase_aligned_distance(u_comp, permutation_matrix(perm) @ u_orig) <= tol
