"""Deterministic random number utilities built on splitmix64.

Everything random in this package flows through one small generator so
that results are reproducible across platforms and across the compiled /
pure-Python engine pair.  Two usage patterns are supported:

* sequential streams (`SplitMix64`) for event-driven simulation, and
* counter-style keyed derivation (`mix64`, `derive_seed`, and the
  vectorised `mix64_array`) for per-edge passage-time fields, which lets
  a field be evaluated lazily at any vertex without storing weights.

The scalar and numpy paths implement bit-identical arithmetic; the
compiled engine repeats the same few lines in C.
"""

from __future__ import annotations

import math

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_MIX_A = 0xBF58476D1CE4E5B9
_MIX_B = 0x94D049BB133111EB

# 2**-53, exact as a float; u64 >> 11 leaves 53 uniform bits.
_INV_2_53 = 1.0 / 9007199254740992.0


def mix64(value: int) -> int:
    """splitmix64 finaliser: a fixed 64-bit bijective scramble."""
    z = value & MASK64
    z = ((z ^ (z >> 30)) * _MIX_A) & MASK64
    z = ((z ^ (z >> 27)) * _MIX_B) & MASK64
    return (z ^ (z >> 31)) & MASK64


def mix64_array(values: np.ndarray) -> np.ndarray:
    """Vectorised `mix64` over a uint64 array (wraparound is intended)."""
    z = values.astype(np.uint64, copy=True)
    z ^= z >> np.uint64(30)
    z *= np.uint64(_MIX_A)
    z ^= z >> np.uint64(27)
    z *= np.uint64(_MIX_B)
    z ^= z >> np.uint64(31)
    return z


def derive_seed(seed: int, *keys: int) -> int:
    """Derive an independent child seed from a master seed and index keys.

    Used for replica streams and for splitting one master seed into
    per-purpose substreams; collisions across distinct key tuples are
    astronomically unlikely.
    """
    h = seed & MASK64
    for k in keys:
        h = mix64((h + GOLDEN + (k & MASK64)) & MASK64)
    return h


def unit_from_bits(bits: int) -> float:
    """Map a u64 to a float in [0, 1) using the top 53 bits."""
    return (bits >> 11) * _INV_2_53


def units_from_bits(bits: np.ndarray) -> np.ndarray:
    """Vectorised `unit_from_bits`."""
    return (bits >> np.uint64(11)).astype(np.float64) * _INV_2_53


class SplitMix64:
    """Sequential splitmix64 stream.

    Mirrors the generator embedded in the simulation engines; the
    pure-Python engine uses this class directly.
    """

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = seed & MASK64

    def u64(self) -> int:
        self._state = (self._state + GOLDEN) & MASK64
        return mix64(self._state)

    def unit(self) -> float:
        return unit_from_bits(self.u64())

    def exponential(self, rate: float = 1.0) -> float:
        return -math.log(1.0 - self.unit()) / rate

    def randint(self, n: int) -> int:
        """Uniform integer in [0, n); modulo bias is ~n/2**64."""
        return self.u64() % n
