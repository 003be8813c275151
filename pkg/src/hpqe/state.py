"""Partitioned fixed-point state vector.

2^n amplitudes live in two int64 numpy arrays (raw Q2.30 re/im) kept in
global-index order, qubit 0 being the least-significant index bit. The
top three index bits select one of 8 segments (2 processing-element
arrays x 4 processing elements), so each segment is a contiguous slice
and the layout doubles as both the flat vector and the per-PE banks.
Below 3 qubits the split is meaningless and a single segment is used.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import fxp, perfmodel
from .perfmodel import CapacityError

MAX_QUBITS_DEFAULT = 26   # desk-scale ceiling; device hard limit is 30

DUMP_MAGIC = b"HPQE"
DUMP_VERSION = 1


class SegmentAddress(NamedTuple):
    pea: int
    pe: int
    offset: int


def segment_of(i: int, n: int) -> SegmentAddress:
    """Map a global index to (PEA, PE, offset) for n >= 3.

    PEA = bit n-1, PE = bits n-2..n-3, offset = low n-3 bits; the
    relative order of amplitudes inside a segment is untouched.
    """
    if n < 3:
        raise ValueError("segmented layout requires n >= 3")
    if not 0 <= i < (1 << n):
        raise ValueError(f"index {i} out of range for n={n}")
    return SegmentAddress(
        pea=(i >> (n - 1)) & 1,
        pe=(i >> (n - 3)) & 3,
        offset=i & ((1 << (n - 3)) - 1),
    )


@dataclass
class StateVector:
    n: int
    re: np.ndarray          # int64 raw Q2.30, length 2^n, global-index order
    im: np.ndarray
    mem_mode: str

    @property
    def size(self) -> int:
        return 1 << self.n

    @property
    def segment_count(self) -> int:
        return 8 if self.n >= 3 else 1

    @property
    def segment_len(self) -> int:
        return self.size // self.segment_count

    def segment(self, sid: int):
        """Views of one segment's components (writes hit the state)."""
        lo = sid * self.segment_len
        hi = lo + self.segment_len
        return self.re[lo:hi], self.im[lo:hi]

    def get(self, i: int) -> fxp.CFx:
        return fxp.CFx(int(self.re[i]), int(self.im[i]))

    def set(self, i: int, c: fxp.CFx) -> None:
        self.re[i] = c.re
        self.im[i] = c.im

    def flatten(self) -> list[fxp.CFx]:
        """Amplitudes in ascending global-index order."""
        return [fxp.CFx(int(r), int(j)) for r, j in zip(self.re, self.im)]

    def to_complex(self) -> np.ndarray:
        """Double-precision view of the state, for metrics only."""
        return (self.re + 1j * self.im) / fxp.SCALE

    def norm_sq(self) -> float:
        a = self.to_complex()
        return float(np.sum(a.real * a.real + a.imag * a.imag))

    def copy(self) -> "StateVector":
        return StateVector(self.n, self.re.copy(), self.im.copy(), self.mem_mode)

    def dump(self) -> bytes:
        """Binary dump: magic, version byte, n byte, then (re, im) int32 LE."""
        header = DUMP_MAGIC + struct.pack("<BB", DUMP_VERSION, self.n)
        body = np.empty(2 * self.size, dtype="<i4")
        body[0::2] = self.re
        body[1::2] = self.im
        return header + body.tobytes()


def init_basis(n: int, k: int, max_qubits: int = MAX_QUBITS_DEFAULT) -> StateVector:
    """Computational basis state |k> with the memory mode annotated."""
    if n < 1:
        raise ValueError(f"qubit count must be >= 1, got {n}")
    perfmodel.check_capacity(n)
    if n > max_qubits:
        raise CapacityError(
            f"{n} qubits exceeds the configured max_qubits={max_qubits}")
    if not 0 <= k < (1 << n):
        raise ValueError(f"basis index {k} out of range for n={n}")
    sv = StateVector(
        n=n,
        re=np.zeros(1 << n, dtype=np.int64),
        im=np.zeros(1 << n, dtype=np.int64),
        mem_mode=perfmodel.memory_mode(n),
    )
    sv.re[k] = fxp.RAW_ONE
    return sv


def from_amplitudes(n: int, amps, max_qubits: int = MAX_QUBITS_DEFAULT) -> StateVector:
    """Quantize a complex amplitude list into a fresh state vector."""
    sv = init_basis(n, 0, max_qubits=max_qubits)
    amps = np.asarray(amps, dtype=np.complex128)
    if amps.shape != (1 << n,):
        raise ValueError(f"expected {1 << n} amplitudes, got {amps.shape}")
    for i, z in enumerate(amps):
        sv.re[i] = fxp.quantize(z.real)
        sv.im[i] = fxp.quantize(z.imag)
    return sv


def load(data: bytes) -> StateVector:
    """Inverse of StateVector.dump()."""
    if data[:4] != DUMP_MAGIC:
        raise ValueError("bad magic in state dump")
    version, n = struct.unpack("<BB", data[4:6])
    if version != DUMP_VERSION:
        raise ValueError(f"unsupported dump version {version}")
    body = np.frombuffer(data[6:], dtype="<i4")
    if body.size != 2 << n:
        raise ValueError("state dump truncated")
    sv = StateVector(
        n=n,
        re=body[0::2].astype(np.int64),
        im=body[1::2].astype(np.int64),
        mem_mode=perfmodel.memory_mode(n),
    )
    return sv
