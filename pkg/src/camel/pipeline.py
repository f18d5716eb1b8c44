"""End-to-end compilation: parse -> map -> schedule -> noise report, under one of three modes."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field, replace

from .chip import ChipConfig, CouplingGraph, Window
from .circuit import Circuit, GateKind, attach_durations, build_dag
from .mapper import Mapping, SearchParams, camel_map, swap_permutation, validate_routing
from .errors import InvariantViolation
from .noise import CrosstalkEvent, detect_crosstalk_events, estimate_fidelity_analytic, run_statevector
from .scheduler import Schedule, schedule, validate_schedule

MODES = ("camel", "agnostic", "serial")


@dataclass
class FidelityReport:
    t_end: float
    n_swaps: int
    n_sublayers: int
    n_crosstalk_events: int
    fidelity_analytic: float
    fidelity_sim: float | None = None
    sim_norm_error: float | None = None

    def to_json(self) -> dict:
        out = {
            "t_end_ns": self.t_end, "n_swaps": self.n_swaps, "n_sublayers": self.n_sublayers,
            "n_crosstalk_events": self.n_crosstalk_events, "fidelity_analytic": self.fidelity_analytic,
            "fidelity_sim": self.fidelity_sim,
        }
        if self.sim_norm_error is not None:
            out["sim_norm_error"] = self.sim_norm_error
        return out


@dataclass
class CompileResult:
    mode: str
    config: ChipConfig
    chip: CouplingGraph
    windows: list[Window]
    original: Circuit
    mapped: Circuit
    initial: Mapping
    final: Mapping
    schedule: Schedule
    events: list[CrosstalkEvent]
    report: FidelityReport
    candidate: tuple[tuple[int, int], bool] = ((0, 0), False)
    problems: list[str] = field(default_factory=list)

    @property
    def compiled(self) -> Circuit:
        """Scheduled physical circuit, barriers included."""
        return self.schedule.circuit

    @property
    def permutation(self) -> list[int]:
        return swap_permutation(self.compiled)


def mode_settings(cfg: ChipConfig, mode: str) -> tuple[tuple[int, int], bool, bool]:
    """(mapper window, parallel constraint on, partitioning on) for a compile mode."""
    if mode == "camel":
        return (cfg.m, cfg.n), True, True
    if mode == "serial":
        return (0, 0), True, True
    if mode == "agnostic":
        return (cfg.m, cfg.n), False, False
    raise ValueError(f"unknown mode {mode!r}; choose from {', '.join(MODES)}")


@dataclass
class _Candidate:
    mapper_window: tuple[int, int]
    windowed: bool
    mapped: object
    initial: Mapping
    final: Mapping
    schedule: Schedule
    events: list[CrosstalkEvent]
    fidelity: float


def _candidates(mode: str, cfg: ChipConfig, portfolio: bool) -> list[tuple[tuple[int, int], bool]]:
    """(mapper window, schedule with windows) pairs tried for a mode, in preference order."""
    window, _, _ = mode_settings(cfg, mode)
    if mode != "camel" or not portfolio or cfg.serial:
        return [(window, mode == "camel")]
    # A 0x0-constrained routing and a windowless partition are both admissible under
    # CAMEL's looser constraints, so they compete as fallbacks.
    return [(window, True), (window, False), ((0, 0), True), ((0, 0), False)]


def compile_circuit(
    circuit: Circuit,
    cfg: ChipConfig,
    mode: str = "camel",
    params: SearchParams | None = None,
    *,
    initial: Mapping | None = None,
    simulate: bool = False,
    validate: bool = True,
    portfolio: bool = True,
) -> CompileResult:
    """Compile ``circuit`` for ``cfg`` under ``mode``.

    In camel mode with ``portfolio`` on, the windowed routing/schedule competes with
    the serialized one and the candidate with the best analytic fidelity wins
    (ties: shorter schedule, then earlier candidate).
    """
    _, constrained, partition = mode_settings(cfg, mode)
    params = replace(params or SearchParams(seed=cfg.seed), parallel_constraint=constrained)
    chip = cfg.grid()
    # only CAMEL calibrates windows; both baselines run without compensation pulses
    windows = cfg.windows(chip) if mode == "camel" else []
    theta = cfg.noise.theta(cfg.durations.t_cz)
    dag = build_dag(attach_durations(circuit, cfg.durations))

    routed: dict[tuple[int, int], tuple] = {}
    best: _Candidate | None = None
    for mapper_window, windowed in _candidates(mode, cfg, portfolio):
        if mapper_window not in routed:
            routed[mapper_window] = camel_map(
                chip, dag, params, durations=cfg.durations, window=mapper_window, initial=initial,
            )
        mapped, pi0, pi_f = routed[mapper_window]
        sched = schedule(
            mapped, chip, windows if windowed else [], far_threshold=cfg.far_threshold, partition=partition,
        )
        events = detect_crosstalk_events(sched, chip, windows, theta)
        cand = _Candidate(
            mapper_window, windowed, mapped, pi0, pi_f, sched, events,
            estimate_fidelity_analytic(sched, events, cfg.noise),
        )
        if best is None or (cand.fidelity, -sched.t_end) > (best.fidelity, -best.schedule.t_end):
            best = cand

    f_sim = norm_err = None
    if simulate:
        res = run_statevector(best.schedule.circuit, best.events)
        f_sim, norm_err = res.fidelity, res.norm_error
    mapped_circuit = best.mapped.circuit()
    report = FidelityReport(
        t_end=best.schedule.t_end,
        n_swaps=mapped_circuit.count(GateKind.SWAP),
        n_sublayers=best.schedule.cz_depth,
        n_crosstalk_events=len(best.events),
        fidelity_analytic=best.fidelity,
        fidelity_sim=f_sim,
        sim_norm_error=norm_err,
    )
    result = CompileResult(
        mode, cfg, chip, windows, circuit, mapped_circuit, best.initial, best.final,
        best.schedule, best.events, report, candidate=(best.mapper_window, best.windowed),
    )
    if validate:
        result.problems = check_result(result)
        if result.problems:
            raise InvariantViolation("; ".join(result.problems[:5]))
    return result


def check_result(r: CompileResult) -> list[str]:
    """Routing and scheduling invariants every compiled result must satisfy."""
    problems = [f"gate {g} on uncoupled qubits" for g in validate_routing(r.compiled, r.chip)]
    # crosstalk freedom is only promised by the crosstalk-aware modes
    problems += validate_schedule(r.schedule, r.chip, r.windows, check_crosstalk=r.mode != "agnostic")
    original_ops = Counter((g.kind, g.param) for g in r.original.gates)
    compiled_ops = Counter(
        (g.kind, g.param) for g in r.compiled.gates if g.kind not in (GateKind.SWAP, GateKind.BARRIER)
    )
    if original_ops != compiled_ops:
        problems.append("compiled circuit does not contain exactly the original gates")
    return problems


def relabel_logical(r: CompileResult) -> Circuit:
    """Compiled circuit renamed so qubit i initially holds logical qubit i (ancillas after)."""
    n = len(r.initial.forward)
    unused = [p for p in range(len(r.initial.inverse)) if r.initial.inverse[p] == -1]
    label = {p: r.initial.inverse[p] for p in range(len(r.initial.inverse)) if r.initial.inverse[p] != -1}
    label.update({p: n + i for i, p in enumerate(unused)})
    gates = tuple(replace(g, operands=tuple(label[q] for q in g.operands)) for g in r.compiled.gates)
    return Circuit(r.compiled.num_qubits, gates)
