"""Shared test utilities: independent oracles and random generators."""

from fractions import Fraction

import numpy as np

from hpqe import fxp, gateset

ALL_KINDS = ("H", "S", "RX", "RY", "RZ", "CX")


def rne(value: Fraction) -> int:
    """Round-half-even of an exact rational, via rational arithmetic.

    Independent of the bit-shift implementation under test.
    """
    floor = value.numerator // value.denominator
    rem = value - floor
    if rem > Fraction(1, 2):
        return floor + 1
    if rem < Fraction(1, 2):
        return floor
    return floor + (floor & 1)


def quantize_oracle(x) -> int:
    """Extended-precision quantization: RNE(x * 2^30), saturated."""
    raw = rne(Fraction(x) * fxp.SCALE)
    return max(fxp.RAW_MIN, min(fxp.RAW_MAX, raw))


def random_raws(rng, size, lo=fxp.RAW_MIN, hi=fxp.RAW_MAX):
    vals = rng.integers(lo, hi + 1, size=size, dtype=np.int64)
    return [int(v) for v in vals]


def random_circuit(n: int, gates: int, rng) -> gateset.Circuit:
    """Uniformly random base-set circuit (CX only when n >= 2)."""
    circuit = gateset.Circuit(n=n)
    for _ in range(gates):
        kind = ALL_KINDS[rng.integers(0, len(ALL_KINDS))]
        if kind == "CX" and n >= 2:
            a, b = rng.choice(n, size=2, replace=False)
            circuit.ops.append(gateset.cx(int(a), int(b)))
        else:
            if kind == "CX":
                kind = "H"
            angle = float(rng.uniform(0, 2 * np.pi)) if kind in ("RX", "RY", "RZ") else None
            circuit.ops.append(gateset.single(kind, int(rng.integers(0, n)), angle))
    return circuit


def random_ref_amplitudes(n: int, rng) -> np.ndarray:
    amps = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return amps / np.linalg.norm(amps)
