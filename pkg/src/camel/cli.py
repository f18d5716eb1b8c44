"""Command-line front end: ``camel compile`` and ``camel bench``."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from .benchmarks import BENCHMARKS, make_benchmark, simon
from .chip import ChipConfig, load_chip_config
from .circuit import emit_circuit, parse_circuit
from .errors import CamelError, InvariantViolation, UnknownBenchmark
from .mapper import SearchParams
from .pipeline import MODES, CompileResult, compile_circuit

SCHEMA_VERSION = 1

log = logging.getLogger("camel")


def _configure_logging() -> None:
    name = os.environ.get("CAMEL_LOG", "WARNING").upper()
    level = getattr(logging, name, None)
    if not isinstance(level, int):
        level = logging.WARNING
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def dump_json(doc: dict) -> str:
    """Canonical JSON text: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def result_json(r: CompileResult) -> dict:
    """Schedule summary, fidelity report and mappings of one compiled circuit."""
    mapper_window, windowed = r.candidate
    return {
        "mode": r.mode,
        "num_qubits": r.original.num_qubits,
        "num_gates": len(r.original.gates),
        "summary": r.report.to_json(),
        "selected": {"mapper_window": list(mapper_window), "windowed_schedule": windowed},
        "initial_mapping": list(r.initial.forward),
        "final_mapping": list(r.final.forward),
        "crosstalk_events": [ev.to_json() for ev in r.events],
        "schedule": r.schedule.to_json(),
    }


def _params(args: argparse.Namespace, cfg: ChipConfig) -> SearchParams:
    seed = cfg.seed if args.seed is None else args.seed
    return SearchParams(depth=args.depth, width=args.width, seed=seed)


def cmd_compile(args: argparse.Namespace) -> dict:
    cfg = load_chip_config(Path(args.chip).read_text(encoding="utf-8"))
    circuit = parse_circuit(Path(args.qasm).read_text(encoding="utf-8"))
    params = _params(args, cfg)
    result = compile_circuit(circuit, cfg, args.mode, params, simulate=args.simulate)
    report = {
        "schema": SCHEMA_VERSION,
        "request": {
            "command": "compile", "qasm": args.qasm, "chip": args.chip, "mode": args.mode,
            "depth": params.depth, "width": params.width, "seed": params.seed, "simulate": args.simulate,
        },
        "chip": cfg.to_json(),
        **result_json(result),
    }
    out = Path(args.out)
    out.write_text(dump_json(report), encoding="utf-8")
    circuit_out = Path(args.circuit_out) if args.circuit_out else out.with_suffix(".qasm")
    circuit_out.write_text(emit_circuit(result.compiled), encoding="utf-8")
    s = result.report
    print(
        f"{args.mode}: t_end={s.t_end:g} ns, swaps={s.n_swaps}, cz_layers={s.n_sublayers}, "
        f"events={s.n_crosstalk_events}, fidelity={s.fidelity_analytic:.6g}"
    )
    return report


def _suite_circuit(name: str, n: int, seed: int):
    if name == "simon" and n % 2:
        return simon(n - 1, seed)
    return make_benchmark(name, n, seed)


def bench_rows(report: dict) -> list[str]:
    """Human-readable comparison table rendered from a bench report."""
    head = f"{'circuit':<14}{'mode':<10}{'t_end':>9}{'ratio':>8}{'swaps':>7}{'events':>8}{'fidelity':>12}"
    rows = [head, "-" * len(head)]
    for entry in report["circuits"]:
        for mode in MODES:
            m = entry["modes"][mode]["summary"]
            rows.append(
                f"{entry['name']:<14}{mode:<10}{m['t_end_ns']:>9g}{entry['depth_ratio'][mode]:>8.3f}"
                f"{m['n_swaps']:>7}{m['n_crosstalk_events']:>8}{m['fidelity_analytic']:>12.5g}"
            )
    return rows


def cmd_bench(args: argparse.Namespace) -> dict:
    cfg = load_chip_config(Path(args.chip).read_text(encoding="utf-8"))
    names = [s.strip() for s in args.suite.split(",") if s.strip()]
    for name in names:
        if name not in BENCHMARKS:
            raise UnknownBenchmark(f"unknown benchmark {name!r}; choose from {', '.join(BENCHMARKS)}")
    n = args.qubits if args.qubits is not None else cfg.M * cfg.N
    params = _params(args, cfg)
    entries = []
    for name in names:
        circuit = _suite_circuit(name, n, params.seed)
        results = {mode: compile_circuit(circuit, cfg, mode, params) for mode in MODES}
        base = results["camel"].report.t_end
        entries.append({
            "name": name,
            "num_qubits": circuit.num_qubits,
            "depth_ratio": {
                mode: (r.report.t_end / base if base > 0 else 1.0) for mode, r in results.items()
            },
            "modes": {mode: result_json(r) for mode, r in results.items()},
        })
    report = {
        "schema": SCHEMA_VERSION,
        "request": {
            "command": "bench", "suite": names, "chip": args.chip, "qubits": n,
            "depth": params.depth, "width": params.width, "seed": params.seed,
        },
        "chip": cfg.to_json(),
        "circuits": entries,
    }
    Path(args.out).write_text(dump_json(report), encoding="utf-8")
    print("\n".join(bench_rows(report)))
    return report


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="camel", description="Crosstalk-aware mapping and scheduling for grid chips.")
    sub = parser.add_subparsers(dest="command", required=True)

    def search_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument("--chip", required=True, help="chip config JSON")
        p.add_argument("--out", required=True, help="report JSON path")
        p.add_argument("--depth", type=int, default=2, help="look-ahead depth L")
        p.add_argument("--width", type=int, default=4, help="candidates kept per level W")
        p.add_argument("--seed", type=int, default=None, help="overrides the chip config seed")

    c = sub.add_parser("compile", help="compile one OpenQASM file")
    c.add_argument("--qasm", required=True)
    c.add_argument("--mode", choices=MODES, default="camel")
    c.add_argument("--simulate", action="store_true", help="also run the state-vector estimate")
    c.add_argument("--circuit-out", default=None, help="compiled circuit path (default: report path with .qasm)")
    search_flags(c)
    c.set_defaults(func=cmd_compile)

    b = sub.add_parser("bench", help="compile built-in benchmarks under every mode")
    b.add_argument("--suite", required=True, help=f"comma-separated names from {', '.join(BENCHMARKS)}")
    b.add_argument("--qubits", type=int, default=None, help="benchmark width (default: whole chip)")
    search_flags(b)
    b.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    _configure_logging()
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except InvariantViolation as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 2
    except (CamelError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
