"""Double-precision reference simulator and comparison metrics.

Two independent readings of circuit execution: gate-by-gate action on
the state (ref_run) and the explicit product of full Kronecker-built
operators (ref_run_matrix, n <= 6). Both apply the circuit's tracked
global phase at the end so transpiled circuits compare directly against
their composite targets.

Fixed-point states are converted to doubles before any metric; metrics
are never computed in fixed point. Reductions use numpy's fixed
pairwise summation so reported values are reproducible.
"""

from __future__ import annotations

import cmath
import json
from dataclasses import asdict, dataclass

import numpy as np

from . import fxp
from .gateset import CX, Circuit, GateOp, matrix_of
from .state import StateVector

MATRIX_MAX_QUBITS = 6


class SizeError(Exception):
    """Full-operator construction requested for too many qubits."""


@dataclass
class RefState:
    n: int
    amps: np.ndarray   # complex128, length 2^n

    def copy(self) -> "RefState":
        return RefState(self.n, self.amps.copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))


def basis_state(n: int, k: int = 0) -> RefState:
    amps = np.zeros(1 << n, dtype=np.complex128)
    amps[k] = 1.0
    return RefState(n, amps)


def _exact_matrix(op: GateOp) -> np.ndarray:
    return matrix_of(op.kind, op.angle)


def _apply_1q(amps: np.ndarray, m: np.ndarray, q: int) -> None:
    a = amps.reshape(-1, 2, 1 << q)
    x = a[:, 0, :].copy()
    y = a[:, 1, :].copy()
    a[:, 0, :] = m[0, 0] * x + m[0, 1] * y
    a[:, 1, :] = m[1, 0] * x + m[1, 1] * y


def _apply_cx(amps: np.ndarray, control: int, target: int, n: int) -> None:
    t = amps.reshape([2] * n)
    sel0 = [slice(None)] * n
    sel1 = [slice(None)] * n
    sel0[n - 1 - control] = 1
    sel1[n - 1 - control] = 1
    sel0[n - 1 - target] = 0
    sel1[n - 1 - target] = 1
    tmp = t[tuple(sel0)].copy()
    t[tuple(sel0)] = t[tuple(sel1)]
    t[tuple(sel1)] = tmp


def ref_run(circuit: Circuit, init: RefState) -> RefState:
    """Gate-by-gate exact action, then the tracked global phase."""
    if circuit.n != init.n:
        raise ValueError(f"circuit n={circuit.n} vs state n={init.n}")
    out = init.copy()
    for op in circuit.ops:
        if op.kind == CX:
            _apply_cx(out.amps, op.control, op.target, out.n)
        else:
            _apply_1q(out.amps, _exact_matrix(op), op.target)
    if circuit.global_phase:
        out.amps *= cmath.exp(1j * circuit.global_phase)
    return out


def gate_operator(op: GateOp, n: int) -> np.ndarray:
    """Full 2^n operator for one gate (CX built directly as a permutation)."""
    dim = 1 << n
    if op.kind == CX:
        u = np.zeros((dim, dim), dtype=np.complex128)
        for j in range(dim):
            out = j ^ (1 << op.target) if (j >> op.control) & 1 else j
            u[out, j] = 1.0
        return u
    m = _exact_matrix(op)
    u = np.array([[1.0 + 0j]])
    for axis in range(n):
        qubit = n - 1 - axis
        u = np.kron(u, m if qubit == op.target else np.eye(2, dtype=np.complex128))
    return u


def circuit_unitary(circuit: Circuit, include_phase: bool = True) -> np.ndarray:
    """Product of all gate operators (and optionally the global phase)."""
    if circuit.n > MATRIX_MAX_QUBITS:
        raise SizeError(f"full operators limited to {MATRIX_MAX_QUBITS} qubits")
    u = np.eye(1 << circuit.n, dtype=np.complex128)
    for op in circuit.ops:
        u = gate_operator(op, circuit.n) @ u
    if include_phase and circuit.global_phase:
        u = u * cmath.exp(1j * circuit.global_phase)
    return u


def ref_run_matrix(circuit: Circuit, init: RefState) -> RefState:
    """Second reading: apply the explicit operator product to the state."""
    if circuit.n != init.n:
        raise ValueError(f"circuit n={circuit.n} vs state n={init.n}")
    u = circuit_unitary(circuit)
    return RefState(init.n, u @ init.amps)


def equal_up_to_phase(u: np.ndarray, v: np.ndarray, tol: float = 1e-12) -> bool:
    """Max-norm equality of two matrices after aligning one global phase."""
    flat_u, flat_v = u.ravel(), v.ravel()
    k = int(np.argmax(np.abs(flat_v)))
    if abs(flat_v[k]) < tol:
        return bool(np.abs(u - v).max() <= tol)
    phase = flat_u[k] / flat_v[k]
    scale = abs(phase)
    if abs(scale - 1.0) > 1e-9:
        return False
    return bool(np.abs(u - (phase / scale) * v).max() <= tol)


# ---------------------------------------------------------------------------
# Metrics.
# ---------------------------------------------------------------------------

@dataclass
class Metrics:
    fidelity: float
    mse_raw: float
    mse_aligned: float
    phase: float

    def to_json(self, n: int | None = None, gates: int | None = None) -> str:
        doc = asdict(self)
        if n is not None:
            doc["n"] = n
        if gates is not None:
            doc["gates"] = gates
        return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def _amplitudes(x) -> np.ndarray:
    if isinstance(x, RefState):
        return x.amps
    if isinstance(x, StateVector):
        return x.to_complex()
    if isinstance(x, (list, tuple)) and x and isinstance(x[0], fxp.CFx):
        return np.array([fxp.to_complex(c) for c in x], dtype=np.complex128)
    return np.asarray(x, dtype=np.complex128)


def fidelity(a, b) -> float:
    """|<a|b>|^2: global-phase-invariant overlap of two state vectors."""
    av, bv = _amplitudes(a), _amplitudes(b)
    if av.shape != bv.shape:
        raise ValueError(f"length mismatch: {av.shape} vs {bv.shape}")
    return float(abs(np.sum(np.conj(av) * bv)) ** 2)


def mse(a, b):
    """Per-amplitude mean squared error, raw and after phase alignment.

    The reported phase is the rotation applied to b that minimizes the
    aligned error, so mse_aligned <= mse_raw always holds; for a sign
    flip it comes out as pi.
    """
    av, bv = _amplitudes(a), _amplitudes(b)
    if av.shape != bv.shape:
        raise ValueError(f"length mismatch: {av.shape} vs {bv.shape}")
    size = av.size
    mse_raw = float(np.sum(np.abs(av - bv) ** 2)) / size
    if mse_raw == 0.0:
        return 0.0, 0.0, 0.0
    overlap = np.sum(av * np.conj(bv))
    phase = float(np.angle(overlap)) if abs(overlap) > 0 else 0.0
    mse_aligned = float(np.sum(np.abs(av - np.exp(1j * phase) * bv) ** 2)) / size
    return mse_raw, mse_aligned, phase


def metrics(a, b) -> Metrics:
    mse_raw, mse_aligned, phase = mse(a, b)
    return Metrics(fidelity=fidelity(a, b), mse_raw=mse_raw,
                   mse_aligned=mse_aligned, phase=phase)
