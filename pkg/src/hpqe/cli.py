"""Benchmark harness: generate circuits, run both engines, emit tables.

Commands:
  run         fixed-point execution -> state dump + cycle/time reports
  compare     fixed-point vs reference -> fidelity/MSE metrics
  bench       sweep a generator over a qubit range -> CSV/JSON rows
  gen         emit a circuit in the text format
  cx-compare  legacy vs pipelined CX cycle table

Exit codes: 0 success, 2 usage error, 3 capacity error, 4 I/O or input
parse error. All outputs are deterministic for a fixed seed and config;
the modeled device time and the emulator's own wall clock are reported
in separate columns and never mixed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import circuits, engine, gateset, oracle, perfmodel, state
from .perfmodel import CapacityError

GENERATORS = ("qft", circuits.CHAIN, circuits.ALTERNATING,
              circuits.ALL_TO_ALL, circuits.ROTATION)

BENCH_COLUMNS = ("circuit", "n", "gates_total", "gates_cx", "gates_single",
                 "total_cycles", "predicted_time_s", "ngs", "fidelity",
                 "mse_raw", "mse_aligned", "wall_clock_s", "error")


def _load_config(path: str | None) -> perfmodel.PerfConfig:
    if path is None:
        return perfmodel.DEFAULT_CONFIG
    return perfmodel.PerfConfig.load(path)


def _angles_for(kind: str, n: int, layers: int, seed: int):
    rng = np.random.default_rng(seed)
    return rng.uniform(0.0, 2.0 * np.pi, circuits.rotation_slots(kind, n, layers))


def _generate(gen: str, n: int, layers: int, seed: int):
    if gen == "qft":
        return f"qft-{n}", circuits.qft(n)
    label = f"{gen}-{n}x{layers}"
    return label, circuits.template(gen, n, layers, _angles_for(gen, n, layers, seed))


def _build_circuit(args):
    if args.circuit is not None:
        text = Path(args.circuit).read_text(encoding="utf-8")
        circuit = gateset.circuit_from_text(text, n=args.n)
        return Path(args.circuit).stem, circuit
    if args.gen is None:
        raise ValueError("either --gen or --circuit is required")
    if args.n is None:
        raise ValueError("--n is required with --gen")
    return _generate(args.gen, args.n, args.layers, args.seed)


def _out_dir(args) -> Path:
    out = Path(args.out) if args.out else Path(".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _parse_range(spec: str):
    if ".." in spec:
        lo, hi = spec.split("..", 1)
        return range(int(lo), int(hi) + 1)
    value = int(spec)
    return range(value, value + 1)


def cmd_run(args) -> int:
    label, circuit = _build_circuit(args)
    cfg = _load_config(args.config)
    sv = state.init_basis(circuit.n, args.init, max_qubits=args.max_qubits)
    sv, report = engine.run_circuit(sv, circuit, cfg, workers=args.workers)
    estimate = perfmodel.estimate_time(report, circuit.n, cfg)
    out = _out_dir(args)
    (out / "state.bin").write_bytes(sv.dump())
    (out / "cycles.json").write_text(report.to_json() + "\n", encoding="utf-8")
    (out / "time.json").write_text(
        json.dumps(estimate.to_dict(), sort_keys=True, separators=(",", ":")) + "\n",
        encoding="utf-8")
    print(f"{label}: n={circuit.n} gates={len(circuit.ops)} "
          f"cycles={report.total_cycles} modeled_time={estimate.total_s:.6g}s "
          f"mem={report.mem_mode}")
    return 0


def cmd_compare(args) -> int:
    label, circuit = _build_circuit(args)
    cfg = _load_config(args.config)
    sv = state.init_basis(circuit.n, args.init, max_qubits=args.max_qubits)
    sv, _ = engine.run_circuit(sv, circuit, cfg, workers=args.workers)
    ref = oracle.ref_run(circuit, oracle.basis_state(circuit.n, args.init))
    result = oracle.metrics(ref, sv)
    doc = result.to_json(n=circuit.n, gates=len(circuit.ops))
    out = _out_dir(args)
    (out / "metrics.json").write_text(doc + "\n", encoding="utf-8")
    print(doc)
    return 0


def _bench_row(gen: str, n: int, args, cfg) -> dict:
    row = dict.fromkeys(BENCH_COLUMNS, "")
    row["circuit"] = f"{gen}-{n}"
    row["n"] = n
    try:
        label, circuit = _generate(gen, n, args.layers, args.seed)
        row["circuit"] = label
        total, n_cx, n_single = circuits.gate_count(circuit)
        row["gates_total"], row["gates_cx"], row["gates_single"] = total, n_cx, n_single
        sv = state.init_basis(n, 0, max_qubits=args.max_qubits)
        t0 = time.perf_counter()
        sv, report = engine.run_circuit(sv, circuit, cfg, workers=args.workers)
        wall = time.perf_counter() - t0
        estimate = perfmodel.estimate_time(report, n, cfg)
        ref = oracle.ref_run(circuit, oracle.basis_state(n, 0))
        result = oracle.metrics(ref, sv)
        row["total_cycles"] = report.total_cycles
        row["predicted_time_s"] = repr(estimate.total_s)
        row["ngs"] = repr(estimate.ngs)
        row["fidelity"] = repr(result.fidelity)
        row["mse_raw"] = repr(result.mse_raw)
        row["mse_aligned"] = repr(result.mse_aligned)
        if not args.no_wall_clock:
            row["wall_clock_s"] = repr(wall)
    except Exception as exc:   # record the failure, keep sweeping
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


def _cx_table(n_range) -> list:
    rows = []
    for n in n_range:
        legacy = engine.cx_cycles_legacy(n)
        new = engine.cx_cycles(n)
        rows.append({"n": n, "legacy_cycles": legacy, "new_cycles": new,
                     "ratio": repr(legacy / new)})
    return rows


def _write_table(rows, columns, fmt: str, path: Path) -> None:
    if fmt == "json":
        text = json.dumps(rows, sort_keys=True, separators=(",", ":")) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        text = buf.getvalue()
    path.write_text(text, encoding="utf-8")


def cmd_bench(args) -> int:
    cfg = _load_config(args.config)
    n_range = _parse_range(args.n)
    rows = [_bench_row(args.gen, n, args, cfg) for n in n_range]
    out = _out_dir(args)
    ext = "json" if args.format == "json" else "csv"
    _write_table(rows, BENCH_COLUMNS, args.format, out / f"bench.{ext}")
    _write_table(_cx_table(n_range), ("n", "legacy_cycles", "new_cycles", "ratio"),
                 args.format, out / f"cx_compare.{ext}")
    failed = sum(1 for r in rows if r["error"])
    print(f"bench: {len(rows)} rows ({failed} failed) -> {out / f'bench.{ext}'}")
    return 0


def cmd_gen(args) -> int:
    label, circuit = _generate(args.generator, args.n, args.layers, args.seed)
    text = gateset.circuit_to_text(circuit)
    if args.out:
        out = _out_dir(args)
        (out / f"{label}.qc").write_text(text, encoding="utf-8")
        print(f"wrote {out / f'{label}.qc'}")
    else:
        sys.stdout.write(text)
    return 0


def cmd_cx_compare(args) -> int:
    rows = _cx_table(_parse_range(args.n))
    out = _out_dir(args)
    ext = "json" if args.format == "json" else "csv"
    path = out / f"cx_compare.{ext}"
    _write_table(rows, ("n", "legacy_cycles", "new_cycles", "ratio"),
                 args.format, path)
    print(f"cx-compare: {len(rows)} rows -> {path}")
    return 0


def _add_common(p, with_n: bool = True) -> None:
    if with_n:
        p.add_argument("--n", type=int, default=None, help="qubit count")
    p.add_argument("--seed", type=int, default=0, help="seed for template angles")
    p.add_argument("--config", default=None, help="PerfConfig JSON file")
    p.add_argument("--out", default=None, help="output directory")
    p.add_argument("--layers", type=int, default=1, help="template layers")
    p.add_argument("--max-qubits", type=int, default=state.MAX_QUBITS_DEFAULT,
                   help="desk-scale qubit ceiling")
    p.add_argument("--workers", type=int, default=1, choices=(1, 2, 4, 8),
                   help="segment workers")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hpqe", description="Fixed-point state-vector emulator harness")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run the fixed-point engine")
    p.add_argument("--gen", choices=GENERATORS, default=None)
    p.add_argument("--circuit", default=None, help="circuit text file")
    p.add_argument("--init", type=int, default=0, help="initial basis index")
    _add_common(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("compare", help="fixed-point vs reference metrics")
    p.add_argument("--gen", choices=GENERATORS, default=None)
    p.add_argument("--circuit", default=None)
    p.add_argument("--init", type=int, default=0)
    _add_common(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("bench", help="sweep a generator over a qubit range")
    p.add_argument("--gen", choices=GENERATORS, required=True)
    p.add_argument("--n", required=True, help="qubit count or range a..b")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--no-wall-clock", action="store_true",
                   help="omit wall clock for byte-identical reruns")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--config", default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--layers", type=int, default=1)
    p.add_argument("--max-qubits", type=int, default=state.MAX_QUBITS_DEFAULT)
    p.add_argument("--workers", type=int, default=1, choices=(1, 2, 4, 8))
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("gen", help="emit a circuit in the text format")
    p.add_argument("generator", choices=GENERATORS)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--layers", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("cx-compare", help="legacy vs pipelined CX cycles")
    p.add_argument("--n", required=True, help="qubit count or range a..b")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_cx_compare)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return 3
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
