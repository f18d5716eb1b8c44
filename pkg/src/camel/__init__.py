"""Crosstalk-aware qubit mapping and gate scheduling for grid superconducting chips."""

from .chip import ChipConfig, CouplingGraph, Window, build_grid, enumerate_windows, load_chip_config
from .circuit import Circuit, DurationConfig, Gate, GateKind, build_dag, emit_circuit, parse_circuit
from .errors import CamelError, InvariantViolation
from .mapper import Mapping, SearchParams, camel_map
from .noise import NoiseConfig
from .pipeline import CompileResult, FidelityReport, compile_circuit
from .scheduler import Schedule, schedule

__all__ = [
    "CamelError", "ChipConfig", "Circuit", "CompileResult", "CouplingGraph", "DurationConfig",
    "FidelityReport", "Gate", "GateKind", "InvariantViolation", "Mapping", "NoiseConfig", "Schedule",
    "SearchParams", "Window", "build_dag", "build_grid", "camel_map", "compile_circuit", "emit_circuit",
    "enumerate_windows", "load_chip_config", "parse_circuit", "schedule",
]
