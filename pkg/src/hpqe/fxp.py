"""Saturating Q2.30 fixed-point arithmetic.

Single source of truth for the accelerator's numeric word: a 32-bit
two's-complement integer read as value = raw * 2^-30 (2 integer bits,
30 fractional bits). Every operation saturates to [-2.0, 2.0 - 2^-30]
instead of wrapping, and every narrowing step rounds to nearest with
ties to even, so results are reproducible bit for bit.

Scalar functions (plain Python ints) define the semantics; the *_v
variants are numpy int64 kernels proven bit-identical to the scalars
by the test suite. Hot loops use the vectorized forms, golden values
and oracles use the scalars.
"""

from __future__ import annotations

import math
import struct
from typing import NamedTuple

import numpy as np

FRAC = 30
SCALE = 1 << FRAC
RAW_MIN = -(1 << 31)
RAW_MAX = (1 << 31) - 1
FRAC_MASK = SCALE - 1
HALF_ULP = 1 << (FRAC - 1)

RAW_ONE = SCALE                  # quantize(1.0)
RAW_SQRT_HALF = 759250125        # quantize(1/sqrt(2)), frozen golden value

DENSE = "dense"
SPARSE = "sparse"


class CFx(NamedTuple):
    """Complex amplitude as a pair of raw Q2.30 components."""

    re: int
    im: int


CFX_ZERO = CFx(0, 0)
CFX_ONE = CFx(RAW_ONE, 0)


def saturate(raw: int) -> int:
    if raw > RAW_MAX:
        return RAW_MAX
    if raw < RAW_MIN:
        return RAW_MIN
    return raw


def quantize(x: float) -> int:
    """Round x to the nearest representable raw value (ties to even)."""
    if not math.isfinite(x):
        raise ValueError(f"cannot quantize non-finite value {x!r}")
    if abs(x) >= 4.0:
        return RAW_MAX if x > 0 else RAW_MIN
    # x * SCALE is exact in float64 (power-of-two scaling); round() is
    # round-half-even on floats.
    return saturate(round(x * SCALE))


def to_real(raw: int) -> float:
    return raw / SCALE


def quantize_complex(z: complex) -> CFx:
    return CFx(quantize(z.real), quantize(z.imag))


def to_complex(c: CFx) -> complex:
    return complex(to_real(c.re), to_real(c.im))


def fx_add(a: int, b: int) -> int:
    return saturate(a + b)


def fx_sub(a: int, b: int) -> int:
    return saturate(a - b)


def fx_mul(a: int, b: int) -> int:
    """Exact 64-bit product, shifted down 30 with round-half-even."""
    p = a * b
    q = p >> FRAC           # floor; remainder below is non-negative
    r = p & FRAC_MASK
    if r > HALF_ULP or (r == HALF_ULP and q & 1):
        q += 1
    return saturate(q)


def cfx_add(a: CFx, b: CFx) -> CFx:
    return CFx(fx_add(a.re, b.re), fx_add(a.im, b.im))


def cfx_mul(a: CFx, b: CFx) -> CFx:
    """Schoolbook complex multiply: 4 real multiplies, 2 adds."""
    re = fx_sub(fx_mul(a.re, b.re), fx_mul(a.im, b.im))
    im = fx_add(fx_mul(a.re, b.im), fx_mul(a.im, b.re))
    return CFx(re, im)


def su_eval(c0: CFx, c1: CFx, x: CFx, y: CFx, op: str = DENSE) -> CFx:
    """One Special Unit step: c0*x + c1*y (dense) or c0*x (sparse).

    Sparse mode bypasses the second multiplier, as the hardware does
    for diagonal gates.
    """
    if op == SPARSE:
        return cfx_mul(c0, x)
    if op != DENSE:
        raise ValueError(f"unknown SU mode {op!r}")
    return cfx_add(cfx_mul(c0, x), cfx_mul(c1, y))


# ---------------------------------------------------------------------------
# Vectorized kernels (numpy int64) -- bit-identical to the scalar forms.
# Products of two in-range raws fit in 62 bits, so int64 is exact.
# ---------------------------------------------------------------------------

def saturate_v(raw: np.ndarray) -> np.ndarray:
    return np.clip(raw, RAW_MIN, RAW_MAX)


def fx_add_v(a, b) -> np.ndarray:
    return saturate_v(np.asarray(a, dtype=np.int64) + b)


def fx_sub_v(a, b) -> np.ndarray:
    return saturate_v(np.asarray(a, dtype=np.int64) - b)


def fx_mul_v(a, b) -> np.ndarray:
    p = np.asarray(a, dtype=np.int64) * b
    q = p >> FRAC
    r = p & FRAC_MASK
    q = q + ((r > HALF_ULP) | ((r == HALF_ULP) & (q & 1 == 1)))
    return saturate_v(q)


def cfx_mul_v(c: CFx, xr, xi):
    """Complex multiply of scalar coefficient c against component arrays."""
    re = fx_sub_v(fx_mul_v(c.re, xr), fx_mul_v(c.im, xi))
    im = fx_add_v(fx_mul_v(c.re, xi), fx_mul_v(c.im, xr))
    return re, im


def su_dense_v(c0: CFx, c1: CFx, xr, xi, yr, yi):
    ar, ai = cfx_mul_v(c0, xr, xi)
    br, bi = cfx_mul_v(c1, yr, yi)
    return fx_add_v(ar, br), fx_add_v(ai, bi)


# ---------------------------------------------------------------------------
# Wire format: raw Fx32 is a 32-bit little-endian two's-complement word.
# ---------------------------------------------------------------------------

def pack_fx32(raw: int) -> bytes:
    return struct.pack("<i", raw)


def unpack_fx32(data: bytes) -> int:
    return struct.unpack("<i", data)[0]


def pack_cfx(c: CFx) -> bytes:
    return struct.pack("<ii", c.re, c.im)


def unpack_cfx(data: bytes) -> CFx:
    re, im = struct.unpack("<ii", data)
    return CFx(re, im)
