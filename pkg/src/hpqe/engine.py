"""Fixed-point gate application and the pipelined CX swapper.

Single-qubit gates walk amplitude pairs (i, i + 2^t) and push each pair
through the SU dataflow, overwriting in place after a read-before-write
of the pair (no shadow buffer). Pairs whose members share a segment are
handled inside that segment (access mode 1); when the target bit selects
the segment itself, the pair spans two PEs at the same offset and the
owning segment computes both outputs from the exchanged values (mode 2).

CX performs no arithmetic: it swaps 2^(n-2) amplitude pairs. The
pipelined swapper schedule costs 2*(2^(n-2)+1)+1 cycles against the
sequential baseline's 5*2^(n-2); `simulate_swapper` steps the machine
cycle by cycle and the closed forms are checked against it in tests.

Segment updates never overlap, so gate application may be spread over
1..8 workers with a barrier between gates; results are bit-identical
for any worker count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor, wait
from dataclasses import dataclass
import json

import numpy as np

from . import fxp, perfmodel
from .gateset import Circuit, GateOp, CX
from .state import StateVector

MODE1 = "Mode1"
MODE2 = "Mode2"

START, IDLE, LOAD, STORE, END = "Start", "IDLE", "LOAD", "STORE", "End"


def access_mode(t: int, n: int) -> str:
    """Mode1: pair lives inside one segment. Mode2: pair spans two PEs."""
    if n < 3:
        raise ValueError("access modes are defined for n >= 3")
    if not 0 <= t < n:
        raise ValueError(f"target {t} out of range for n={n}")
    return MODE1 if t <= n - 4 else MODE2


def cx_cycles(n: int) -> int:
    """Pipelined swapper schedule: 2*(2^(n-2)+1)+1 cycles."""
    if n < 2:
        raise ValueError("CX requires n >= 2")
    return 2 * ((1 << (n - 2)) + 1) + 1


def cx_cycles_legacy(n: int) -> int:
    """Sequential baseline: 5 cycles for each of the 2^(n-2) pairs."""
    if n < 2:
        raise ValueError("CX requires n >= 2")
    return 5 * (1 << (n - 2))


# ---------------------------------------------------------------------------
# CX pair addressing: pair k is built by re-inserting a 0 at the target
# and a 1 at the control position of the compressed index k. Ascending k
# is the canonical enumeration order.
# ---------------------------------------------------------------------------

def _insert_bit(x, pos: int, bit: int):
    high = (x >> pos) << (pos + 1)
    low = x & ((1 << pos) - 1)
    return high | low | (bit << pos)


def cx_pair(k: int, n: int, control: int, target: int) -> tuple[int, int]:
    """Global indices of the k-th swapped pair (control=1, target=0/1)."""
    lo, hi = sorted((control, target))
    x = _insert_bit(_insert_bit(k, lo, 0), hi, 0)
    i0 = x | (1 << control)
    return i0, i0 | (1 << target)


def cx_pair_indices(n: int, control: int, target: int):
    """Vectorized cx_pair over all 2^(n-2) compressed indices."""
    k = np.arange(1 << (n - 2), dtype=np.int64)
    lo, hi = sorted((control, target))
    x = _insert_bit(_insert_bit(k, lo, 0), hi, 0)
    i0 = x | (1 << control)
    return i0, i0 | (1 << target)


def apply_cx(state: StateVector, control: int, target: int) -> int:
    """Swap the control=1 amplitude pairs in place; returns cycles."""
    n = state.n
    if n < 2:
        raise ValueError("CX requires n >= 2")
    if control == target or not (0 <= control < n and 0 <= target < n):
        raise ValueError(f"bad CX qubits ({control}, {target}) for n={n}")
    i0, i1 = cx_pair_indices(n, control, target)
    for arr in (state.re, state.im):
        tmp = arr[i0].copy()
        arr[i0] = arr[i1]
        arr[i1] = tmp
    return cx_cycles(n)


# ---------------------------------------------------------------------------
# Swapper state machine. One IDLE computes the first pair's addresses,
# then LOAD/STORE alternate (each STORE retires a pair while the next
# addresses are recalculated); Start arms the read port and End retires
# the final writes. Total: 1 + 1 + 2*pairs + 1 = 2*(2^(n-2)+1)+1.
# ---------------------------------------------------------------------------

@dataclass
class SwapperState:
    stage: str
    pair_counter: int
    pending_addresses: tuple[int, int] | None


@dataclass
class SwapperRun:
    n: int
    cycles: int
    pairs_processed: int
    stage_counts: dict
    writes_outstanding: int
    trace: list | None


def simulate_swapper(n: int, control: int | None = None,
                     target: int | None = None,
                     record_trace: bool | None = None) -> SwapperRun:
    """Step the swap schedule cycle by cycle for one CX gate.

    Traces are recorded for n <= 12 unless forced; the cycle and stage
    counts are always produced by honest stepping.
    """
    if n < 2:
        raise ValueError("swapper requires n >= 2")
    if control is None:
        control = n - 1
    if target is None:
        target = 0
    pairs = 1 << (n - 2)
    record = (n <= 12) if record_trace is None else record_trace
    trace = [] if record else None
    counts = {START: 0, IDLE: 0, LOAD: 0, STORE: 0, END: 0}
    writes_outstanding = 0

    def step(st: SwapperState):
        counts[st.stage] += 1
        if trace is not None:
            trace.append(st.stage)

    st = SwapperState(stage=START, pair_counter=0, pending_addresses=None)
    step(st)                                     # arm the read port
    st.stage = IDLE
    st.pending_addresses = cx_pair(0, n, control, target)
    step(st)                                     # first pair's addresses
    done = 0
    while done < pairs:
        if writes_outstanding:                   # prior write lands in memory
            writes_outstanding -= 1
        st.stage = LOAD                          # reads issued at pending
        step(st)
        st.stage = STORE                         # write back + next addresses
        done += 1
        st.pair_counter = done
        if done < pairs:
            st.pending_addresses = cx_pair(done, n, control, target)
        else:
            st.pending_addresses = None
        writes_outstanding += 1
        step(st)
    st.stage = END
    writes_outstanding -= 1                      # final write retires here
    step(st)
    cycles = sum(counts.values())
    return SwapperRun(n=n, cycles=cycles, pairs_processed=done,
                      stage_counts=counts, writes_outstanding=writes_outstanding,
                      trace=trace)


# ---------------------------------------------------------------------------
# Single-qubit application.
# ---------------------------------------------------------------------------

def _segment_bit(t: int, n: int) -> int:
    return t - (n - 3)


def _update_intra(sv: StateVector, op: GateOp, sid: int) -> None:
    # both pair members inside segment sid (or the whole state for n < 3)
    t = op.target
    m00, m01, m10, m11 = op.matrix
    re, im = sv.segment(sid)
    r3 = re.reshape(-1, 2, 1 << t)
    i3 = im.reshape(-1, 2, 1 << t)
    if op.sparse:
        # diagonal: each half scales independently, no pair exchange
        r3[:, 0, :], i3[:, 0, :] = fxp.cfx_mul_v(m00, r3[:, 0, :], i3[:, 0, :])
        r3[:, 1, :], i3[:, 1, :] = fxp.cfx_mul_v(m11, r3[:, 1, :], i3[:, 1, :])
        return
    xr, xi = r3[:, 0, :].copy(), i3[:, 0, :].copy()
    yr, yi = r3[:, 1, :].copy(), i3[:, 1, :].copy()
    r3[:, 0, :], i3[:, 0, :] = fxp.su_dense_v(m00, m01, xr, xi, yr, yi)
    r3[:, 1, :], i3[:, 1, :] = fxp.su_dense_v(m10, m11, xr, xi, yr, yi)


def _update_cross(sv: StateVector, op: GateOp, sid: int) -> None:
    # pair spans two segments at equal offsets; sid owns the bit-clear half
    bit = _segment_bit(op.target, sv.n)
    m00, m01, m10, m11 = op.matrix
    if op.sparse:
        # diagonal gates touch no partner data: scale the whole segment
        coeff = m11 if (sid >> bit) & 1 else m00
        re, im = sv.segment(sid)
        re[:], im[:] = fxp.cfx_mul_v(coeff, re, im)
        return
    if (sid >> bit) & 1:
        return   # partner half: written by the owning segment
    xr_v, xi_v = sv.segment(sid)
    yr_v, yi_v = sv.segment(sid | (1 << bit))
    xr, xi = xr_v.copy(), xi_v.copy()
    yr, yi = yr_v.copy(), yi_v.copy()
    xr_v[:], xi_v[:] = fxp.su_dense_v(m00, m01, xr, xi, yr, yi)
    yr_v[:], yi_v[:] = fxp.su_dense_v(m10, m11, xr, xi, yr, yi)


def _apply_single_segments(sv: StateVector, op: GateOp, seg_ids) -> None:
    if sv.n < 3:
        for sid in seg_ids:
            _update_intra(sv, op, sid)
        return
    mode = access_mode(op.target, sv.n)
    for sid in seg_ids:
        if mode == MODE1:
            _update_intra(sv, op, sid)
        else:
            _update_cross(sv, op, sid)


def apply_single(state: StateVector, gate: GateOp,
                 cfg: perfmodel.PerfConfig = perfmodel.DEFAULT_CONFIG) -> int:
    """Apply one quantized single-qubit gate in place; returns cycles."""
    if gate.kind == CX:
        raise ValueError("apply_single does not take CX")
    if gate.matrix is None:
        raise ValueError("gate matrix not quantized (use gateset.single)")
    if not 0 <= gate.target < state.n:
        raise ValueError(f"target {gate.target} out of range for n={state.n}")
    _apply_single_segments(state, gate, range(state.segment_count))
    return perfmodel.cycles_single(state.n, cfg)


# ---------------------------------------------------------------------------
# Circuit execution and cycle accounting.
# ---------------------------------------------------------------------------

@dataclass
class CycleReport:
    n: int
    mem_mode: str
    per_gate: list          # (gate index, kind, cycles)
    total_cycles: int
    cx_pairs_swapped: int
    mode2_gate_count: int

    def to_json(self) -> str:
        doc = {
            "gates": [{"index": i, "kind": k, "cycles": c}
                      for i, k, c in self.per_gate],
            "total_cycles": self.total_cycles,
            "n": self.n,
            "mem_mode": self.mem_mode,
        }
        return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def _gate_cycles(op: GateOp, n: int, cfg: perfmodel.PerfConfig) -> int:
    return cx_cycles(n) if op.kind == CX else perfmodel.cycles_single(n, cfg)


def cycle_report(circuit: Circuit,
                 cfg: perfmodel.PerfConfig = perfmodel.DEFAULT_CONFIG) -> CycleReport:
    """Pure cycle accounting for a circuit, no state required."""
    n = circuit.n
    per_gate = []
    total = pairs = mode2 = 0
    for idx, op in enumerate(circuit.ops):
        cycles = _gate_cycles(op, n, cfg)
        per_gate.append((idx, op.kind, cycles))
        total += cycles
        if op.kind == CX:
            pairs += 1 << (n - 2)
        elif n >= 3 and access_mode(op.target, n) == MODE2:
            mode2 += 1
    return CycleReport(n=n, mem_mode=perfmodel.memory_mode(n, cfg),
                       per_gate=per_gate, total_cycles=total,
                       cx_pairs_swapped=pairs, mode2_gate_count=mode2)


def _worker_partition(segment_count: int, workers: int):
    return [[s for s in range(segment_count) if s % workers == w]
            for w in range(workers)]


def run_circuit(state: StateVector, circuit: Circuit,
                cfg: perfmodel.PerfConfig = perfmodel.DEFAULT_CONFIG,
                workers: int = 1):
    """Apply a base-set circuit gate by gate, accumulating cycles.

    Returns (state, CycleReport). With workers > 1 the 8 segments are
    split across a thread pool with a barrier after every gate; the
    result is bit-identical for any worker count.
    """
    if circuit.n != state.n:
        raise ValueError(f"circuit is for n={circuit.n}, state has n={state.n}")
    if workers < 1:
        raise ValueError("workers must be >= 1")
    workers = min(workers, state.segment_count)
    per_gate = []
    total = pairs = mode2 = 0
    pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None
    parts = _worker_partition(state.segment_count, workers)
    try:
        for idx, op in enumerate(circuit.ops):
            if op.kind == CX:
                cycles = apply_cx(state, op.control, op.target)
                pairs += 1 << (state.n - 2)
            else:
                if op.matrix is None:
                    raise ValueError(f"gate {idx} has no quantized matrix")
                if pool is None:
                    _apply_single_segments(state, op, range(state.segment_count))
                else:
                    futures = [pool.submit(_apply_single_segments, state, op, part)
                               for part in parts if part]
                    for f in wait(futures).done:
                        f.result()   # re-raise worker errors, barrier per gate
                cycles = perfmodel.cycles_single(state.n, cfg)
                if state.n >= 3 and access_mode(op.target, state.n) == MODE2:
                    mode2 += 1
            per_gate.append((idx, op.kind, cycles))
            total += cycles
    finally:
        if pool is not None:
            pool.shutdown(wait=True)
    report = CycleReport(n=state.n, mem_mode=state.mem_mode, per_gate=per_gate,
                         total_cycles=total, cx_pairs_swapped=pairs,
                         mode2_gate_count=mode2)
    return state, report
