"""Desk-scale noise evaluation: decoherence, crosstalk events, fidelity proxy, state-vector runs."""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .circuit import Circuit, Gate, GateKind
from .errors import SchemaError, TooManyQubits

if TYPE_CHECKING:
    from .chip import CouplingGraph, Window
    from .scheduler import Schedule

DEFAULT_G_XTALK = 2 * math.pi * 1e-3  # 1 MHz in rad/ns


@dataclass(frozen=True)
class NoiseConfig:
    """Decoherence times in ns (scalar or one per physical qubit), error rates per gate."""

    T1: float | tuple[float, ...] = 50_000.0
    T2: float | tuple[float, ...] = 30_000.0
    g_xtalk: float = DEFAULT_G_XTALK
    eps_1q: float = 0.001
    eps_cz: float = 0.01
    eps_readout: float = 0.01

    def __post_init__(self):
        for name in ("T1", "T2"):
            v = getattr(self, name)
            vals = v if isinstance(v, tuple) else (v,)
            if not vals or any(x <= 0 for x in vals):
                raise ValueError(f"{name} must be positive")
        for name in ("eps_1q", "eps_cz", "eps_readout"):
            if not 0 <= getattr(self, name) < 1:
                raise ValueError(f"{name} must lie in [0, 1)")
        if self.g_xtalk < 0:
            raise ValueError("g_xtalk must be non-negative")

    def t1(self, q: int) -> float:
        if isinstance(self.T1, tuple):
            return self.T1[q]
        return self.T1

    def theta(self, t_cz: float) -> float:
        return self.g_xtalk * t_cz

    def to_json(self) -> dict:
        def times(v):
            return list(v) if isinstance(v, tuple) else v

        return {
            "T1_ns": times(self.T1), "T2_ns": times(self.T2),
            "g_xtalk_rad_per_ns": self.g_xtalk,
            "eps_1q": self.eps_1q, "eps_cz": self.eps_cz, "eps_readout": self.eps_readout,
        }

    @classmethod
    def from_json(cls, doc: dict, path: str = "$.noise") -> "NoiseConfig":
        known = {"T1_ns", "T2_ns", "g_xtalk_rad_per_ns", "eps_1q", "eps_cz", "eps_readout"}
        unknown = set(doc) - known
        if unknown:
            raise SchemaError(f"{path}.{sorted(unknown)[0]}", "unknown key")
        base = cls()
        kwargs = {}
        for key, attr in (("T1_ns", "T1"), ("T2_ns", "T2")):
            if key not in doc:
                continue
            v = doc[key]
            if isinstance(v, list):
                if not v or not all(_is_num(x) and x > 0 for x in v):
                    raise SchemaError(f"{path}.{key}", "expected non-empty array of positive numbers")
                kwargs[attr] = tuple(float(x) for x in v)
            elif _is_num(v) and v > 0:
                kwargs[attr] = float(v)
            else:
                raise SchemaError(f"{path}.{key}", "expected positive number or array")
        if "g_xtalk_rad_per_ns" in doc:
            v = doc["g_xtalk_rad_per_ns"]
            if not _is_num(v) or v < 0:
                raise SchemaError(f"{path}.g_xtalk_rad_per_ns", "expected non-negative number")
            kwargs["g_xtalk"] = float(v)
        for key in ("eps_1q", "eps_cz", "eps_readout"):
            if key in doc:
                v = doc[key]
                if not _is_num(v) or not 0 <= v < 1:
                    raise SchemaError(f"{path}.{key}", "expected number in [0, 1)")
                kwargs[key] = float(v)
        from dataclasses import replace

        return replace(base, **kwargs)


def _is_num(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def decoherence_prob(t: float, T: float) -> float:
    """Probability that a qubit has decohered after ``t`` ns given decoherence time ``T``."""
    if t < 0 or T <= 0:
        raise ValueError("need t >= 0 and T > 0")
    return -math.expm1(-t / T)


def crosstalk_unitary(theta: float) -> np.ndarray:
    """Population swap between |011> and |110> on the ordering |Q_s Q_2 Q_1>."""
    u = np.eye(8, dtype=complex)
    c, s = math.cos(theta), math.sin(theta)
    u[3, 3] = u[6, 6] = c
    u[3, 6] = u[6, 3] = -1j * s
    return u


@dataclass(frozen=True)
class CrosstalkEvent:
    start: float
    end: float
    victim: int
    aggressor: int
    spectator: int
    victim_qubit: int  # victim operand adjacent to the spectator (Q_2)
    other_qubit: int   # remaining victim operand (Q_1)
    theta: float

    def to_json(self) -> dict:
        return {
            "window_ns": [self.start, self.end], "victim": self.victim, "aggressor": self.aggressor,
            "spectator": self.spectator, "victim_qubits": [self.victim_qubit, self.other_qubit],
            "theta": self.theta,
        }


def _overlap(a0: float, a1: float, b0: float, b1: float) -> bool:
    return a0 < b1 and b0 < a1


def mitigated(a: Sequence[int], b: Sequence[int], windows: Sequence["Window"]) -> bool:
    """Both gates lie inside one calibrated window, so a compensation pulse covers the pair."""
    both = tuple(a) + tuple(b)
    return any(w.covers(both) for w in windows)


def detect_crosstalk_events(
    s: "Schedule", g: "CouplingGraph", windows: Sequence["Window"], theta: float,
) -> list[CrosstalkEvent]:
    """Ordered (victim, aggressor) pairs of overlapping two-qubit gates one hop apart."""
    gates = [x for x in s.circuit.gates if x.is_two_qubit]
    events = []
    for v in gates:
        v0 = s.g_time[v.id]
        v1 = v0 + v.duration
        for a in gates:
            if a.id == v.id or set(a.operands) & set(v.operands):
                continue
            a0 = s.g_time[a.id]
            a1 = a0 + a.duration
            if not _overlap(v0, v1, a0, a1):
                continue
            contacts = sorted((sq, vq) for vq in v.operands for sq in a.operands if g.coupled(sq, vq))
            if not contacts or mitigated(v.operands, a.operands, windows):
                continue
            spectator, vq = contacts[0]
            other = v.operands[1] if v.operands[0] == vq else v.operands[0]
            events.append(CrosstalkEvent(max(v0, a0), min(v1, a1), v.id, a.id, spectator, vq, other, theta))
    return events


_EPS_KIND = {GateKind.X: "eps_1q", GateKind.H: "eps_1q", GateKind.RZ: "eps_1q", GateKind.CZ: "eps_cz"}


def estimate_fidelity_analytic(s: "Schedule", events: Sequence[CrosstalkEvent], noise: NoiseConfig) -> float:
    """Gate errors x per-qubit T1 decay over the whole run x crosstalk swaps x readout."""
    f = 1.0
    active: set[int] = set()
    measured = 0
    for gate in s.circuit.gates:
        if gate.kind is GateKind.BARRIER:
            continue
        active.update(gate.operands)
        if gate.kind is GateKind.MEASURE:
            measured += 1
        elif gate.kind is GateKind.SWAP:
            f *= (1 - noise.eps_cz) ** 3
        else:
            f *= 1 - getattr(noise, _EPS_KIND[gate.kind])
    for q in sorted(active):
        f *= math.exp(-s.t_end / noise.t1(q))
    for ev in events:
        f *= math.cos(ev.theta) ** 2
    f *= (1 - noise.eps_readout) ** measured
    return min(1.0, max(0.0, f))


# ---------------------------------------------------------------------------
# State vector

_SQ2 = 1 / math.sqrt(2)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_H = np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=complex)
_CZ = np.diag([1, 1, 1, -1]).astype(complex)
_SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)


def gate_matrix(gate: Gate) -> np.ndarray | None:
    """Unitary of a gate on its operands (first operand most significant); None for non-unitaries."""
    if gate.kind is GateKind.X:
        return _X
    if gate.kind is GateKind.H:
        return _H
    if gate.kind is GateKind.RZ:
        half = gate.param / 2
        return np.diag([np.exp(-1j * half), np.exp(1j * half)])
    if gate.kind is GateKind.CZ:
        return _CZ
    if gate.kind is GateKind.SWAP:
        return _SWAP
    return None


def apply_matrix(state: np.ndarray, u: np.ndarray, axes: Sequence[int]) -> np.ndarray:
    """Apply ``u`` to tensor axes ``axes`` of ``state`` (shape (2,)*n + batch)."""
    k = len(axes)
    ut = u.reshape((2,) * (2 * k))
    out = np.tensordot(ut, state, axes=(list(range(k, 2 * k)), list(axes)))
    return np.moveaxis(out, list(range(k)), list(axes))


@dataclass
class SimResult:
    fidelity: float
    norm_error: float
    qubits: tuple[int, ...]


def _sim_qubits(c: Circuit, events: Sequence[CrosstalkEvent]) -> tuple[int, ...]:
    qs = {q for g in c.gates if g.kind is not GateKind.BARRIER for q in g.operands}
    qs.update(ev.spectator for ev in events)
    return tuple(sorted(qs))


def run_statevector(c: Circuit, events: Sequence[CrosstalkEvent] = (), max_qubits: int = 12) -> SimResult:
    """Ideal vs. crosstalk-afflicted pure-state runs; measurements and barriers are skipped."""
    qubits = _sim_qubits(c, events)
    n = len(qubits)
    if n > max_qubits:
        raise TooManyQubits(f"{n} qubits exceeds the state-vector limit of {max_qubits}")
    axis = {q: i for i, q in enumerate(qubits)}
    by_victim: dict[int, list[CrosstalkEvent]] = {}
    for ev in sorted(events, key=lambda e: (e.victim, e.aggressor)):
        by_victim.setdefault(ev.victim, []).append(ev)

    ideal = np.zeros((2,) * n, dtype=complex)
    ideal[(0,) * n] = 1
    noisy = ideal.copy()
    norm_error = 0.0
    for gate in c.gates:
        u = gate_matrix(gate)
        if u is None:
            continue
        ax = [axis[q] for q in gate.operands]
        ideal = apply_matrix(ideal, u, ax)
        noisy = apply_matrix(noisy, u, ax)
        for ev in by_victim.get(gate.id, ()):
            noisy = apply_matrix(
                noisy, crosstalk_unitary(ev.theta),
                [axis[ev.spectator], axis[ev.victim_qubit], axis[ev.other_qubit]],
            )
        norm_error = max(norm_error, abs(np.linalg.norm(noisy) - 1), abs(np.linalg.norm(ideal) - 1))
    overlap = np.vdot(ideal.ravel(), noisy.ravel())
    return SimResult(float(abs(overlap) ** 2), float(norm_error), qubits)


def simulate_statevector(c: Circuit, events: Sequence[CrosstalkEvent] = (), max_qubits: int = 12) -> float:
    """Fidelity |<ideal|noisy>|^2 where the noisy run applies each event's swap after its victim."""
    return run_statevector(c, events, max_qubits).fidelity
