"""Grid chip model: coupling graph, hop distances, calibration windows, JSON chip config."""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .circuit import DurationConfig
from .errors import DisconnectedGraph, InvalidDimensions, SchemaError, WindowTooLarge
from .noise import NoiseConfig


@dataclass(frozen=True)
class CouplingGraph:
    """M x N grid; qubit ``r * N + c`` sits at row r, column c."""

    rows: int
    cols: int
    edges: tuple[tuple[int, int], ...]

    @property
    def num_qubits(self) -> int:
        return self.rows * self.cols

    def coord(self, q: int) -> tuple[int, int]:
        return divmod(q, self.cols)

    def index(self, r: int, c: int) -> int:
        return r * self.cols + c

    @cached_property
    def neighbors(self) -> tuple[tuple[int, ...], ...]:
        adj: list[list[int]] = [[] for _ in range(self.num_qubits)]
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        return tuple(tuple(sorted(x)) for x in adj)

    @cached_property
    def edge_set(self) -> frozenset[tuple[int, int]]:
        return frozenset(self.edges)

    @cached_property
    def edge_index(self) -> dict[tuple[int, int], int]:
        return {e: i for i, e in enumerate(self.edges)}

    def coupled(self, a: int, b: int) -> bool:
        return (min(a, b), max(a, b)) in self.edge_set

    @cached_property
    def distances(self) -> "DistanceMatrix":
        return distance_matrix(self)


def build_grid(M: int, N: int) -> CouplingGraph:
    if M < 1 or N < 1:
        raise InvalidDimensions(f"grid dimensions must be positive, got {M}x{N}")
    edges = []
    for r in range(M):
        for c in range(N):
            q = r * N + c
            if c + 1 < N:
                edges.append((q, q + 1))
            if r + 1 < M:
                edges.append((q, q + N))
    return CouplingGraph(M, N, tuple(sorted(edges)))


class DistanceMatrix:
    """All-pairs hop counts; indexable as ``D[i, j]`` or ``D(i, j)``."""

    def __init__(self, matrix: np.ndarray):
        self.matrix = matrix
        self.matrix.setflags(write=False)

    def __call__(self, a: int, b: int) -> int:
        return int(self.matrix[a, b])

    def __getitem__(self, ij) -> int:
        return int(self.matrix[ij])

    def __len__(self) -> int:
        return len(self.matrix)


def distance_matrix(g: CouplingGraph) -> DistanceMatrix:
    n = g.num_qubits
    dist = np.full((n, n), -1, dtype=np.int64)
    for src in range(n):
        row = dist[src]
        row[src] = 0
        queue = deque([src])
        while queue:
            u = queue.popleft()
            for v in g.neighbors[u]:
                if row[v] < 0:
                    row[v] = row[u] + 1
                    queue.append(v)
        if (row < 0).any():
            raise DisconnectedGraph(f"qubit {src} cannot reach {int(np.flatnonzero(row < 0)[0])}")
    return DistanceMatrix(dist)


@dataclass(frozen=True)
class Window:
    origin: tuple[int, int]
    size: tuple[int, int]
    qubits: frozenset[int]

    @property
    def diameter(self) -> int:
        return self.size[0] + self.size[1] - 2

    def covers(self, qubits) -> bool:
        return all(q in self.qubits for q in qubits)


def enumerate_windows(g: CouplingGraph, m: int, n: int) -> list[Window]:
    """All m x n placements in row-major origin order. ``m = n = 0`` yields no windows."""
    if m == 0 and n == 0:
        return []
    if m < 1 or n < 1:
        raise WindowTooLarge(f"window size must be positive, got {m}x{n}")
    if m > g.rows or n > g.cols:
        raise WindowTooLarge(f"{m}x{n} window does not fit on a {g.rows}x{g.cols} chip")
    out = []
    for r in range(g.rows - m + 1):
        for c in range(g.cols - n + 1):
            qs = frozenset(g.index(r + i, c + j) for i in range(m) for j in range(n))
            out.append(Window((r, c), (m, n), qs))
    return out


def min_distance(a, b, D: DistanceMatrix) -> int:
    return int(D.matrix[np.ix_(sorted(a), sorted(b))].min())


def windows_disjoint_far(a: Window, b: Window, D: DistanceMatrix, threshold: int = 2) -> bool:
    """True when every qubit of ``a`` is more than ``threshold`` hops from every qubit of ``b``."""
    return min_distance(a.qubits, b.qubits, D) > threshold


@dataclass(frozen=True)
class ChipConfig:
    M: int
    N: int
    m: int = 2
    n: int = 2
    durations: DurationConfig = field(default_factory=DurationConfig)
    noise: NoiseConfig = field(default_factory=NoiseConfig)
    seed: int = 0
    far_threshold: int = 2

    @property
    def serial(self) -> bool:
        return self.m == 0 and self.n == 0

    def grid(self) -> CouplingGraph:
        return build_grid(self.M, self.N)

    def windows(self, g: CouplingGraph | None = None) -> list[Window]:
        return enumerate_windows(g or self.grid(), self.m, self.n)

    def with_window(self, m: int, n: int) -> "ChipConfig":
        from dataclasses import replace

        return replace(self, m=m, n=n)

    def to_json(self) -> dict:
        d = self.durations
        return {
            "M": self.M, "N": self.N,
            "window": {"m": self.m, "n": self.n, "far_threshold": self.far_threshold},
            "durations": {"t_1q": d.t_1q, "t_cz": d.t_cz, "t_swap": d.t_swap, "t_measure": d.t_measure},
            "noise": self.noise.to_json(),
            "seed": self.seed,
        }


def _int(doc: dict, key: str, path: str, default=None, minimum: int | None = None) -> int:
    if key not in doc:
        if default is None:
            raise SchemaError(f"{path}.{key}", "required")
        return default
    v = doc[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise SchemaError(f"{path}.{key}", f"expected integer, got {v!r}")
    if minimum is not None and v < minimum:
        raise SchemaError(f"{path}.{key}", f"must be >= {minimum}")
    return v


def _number(doc: dict, key: str, path: str, default: float) -> float:
    if key not in doc:
        return default
    v = doc[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise SchemaError(f"{path}.{key}", f"expected number, got {v!r}")
    if v <= 0:
        raise SchemaError(f"{path}.{key}", "must be positive")
    return float(v)


def _object(doc: dict, key: str, path: str) -> dict:
    v = doc.get(key, {})
    if not isinstance(v, dict):
        raise SchemaError(f"{path}.{key}", "expected object")
    return v


_TOP_KEYS = {"M", "N", "window", "durations", "noise", "seed", "topology"}


def parse_chip_config(doc) -> ChipConfig:
    if not isinstance(doc, dict):
        raise SchemaError("$", "expected object")
    unknown = set(doc) - _TOP_KEYS
    if unknown:
        raise SchemaError(f"$.{sorted(unknown)[0]}", "unknown key")
    topology = doc.get("topology", "grid")
    if topology != "grid":
        raise SchemaError("$.topology", "only rectangular grid chips are supported")
    M = _int(doc, "M", "$", minimum=1)
    N = _int(doc, "N", "$", minimum=1)

    win = _object(doc, "window", "$")
    m = _int(win, "m", "$.window", default=2 if "n" not in win else None, minimum=0)
    n = _int(win, "n", "$.window", default=2 if "m" not in win else None, minimum=0)
    if (m == 0) != (n == 0):
        raise SchemaError("$.window", "m and n must both be zero (serialization) or both positive")
    if m > M or n > N:
        raise SchemaError("$.window", f"{m}x{n} window does not fit on a {M}x{N} chip")
    far = _int(win, "far_threshold", "$.window", default=2, minimum=0)

    dur = _object(doc, "durations", "$")
    unknown = set(dur) - {"t_1q", "t_cz", "t_swap", "t_measure"}
    if unknown:
        raise SchemaError(f"$.durations.{sorted(unknown)[0]}", "unknown key")
    t_1q = _number(dur, "t_1q", "$.durations", 20.0)
    t_cz = _number(dur, "t_cz", "$.durations", 40.0)
    durations = DurationConfig(
        t_1q=t_1q,
        t_cz=t_cz,
        t_swap=_number(dur, "t_swap", "$.durations", 3 * t_cz),
        t_measure=_number(dur, "t_measure", "$.durations", 500.0),
    )
    noise = NoiseConfig.from_json(_object(doc, "noise", "$"), "$.noise")
    if isinstance(noise.T1, tuple) and len(noise.T1) != M * N:
        raise SchemaError("$.noise.T1_ns", f"per-qubit list needs {M * N} entries, got {len(noise.T1)}")
    seed = _int(doc, "seed", "$", default=0)
    return ChipConfig(M, N, m, n, durations, noise, seed, far)


def load_chip_config(text: str) -> ChipConfig:
    """Parse and validate a chip config JSON document, filling defaults."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError("$", f"invalid JSON: {exc}") from None
    return parse_chip_config(doc)
