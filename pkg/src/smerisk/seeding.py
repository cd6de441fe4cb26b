"""Deterministic derivation of random substreams.

Every random draw in the package flows from a user-supplied master seed.
Independent substreams (one per generated data column, one per forest
tree) are derived with the splitmix64 finalizer, so the stream with index
``k`` depends only on ``(master_seed, k)``: adding a new column never
perturbs existing columns, and growing a forest by more trees never
changes the trees already trained.
"""

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX_A = 0xBF58476D1CE4E5B9
_MIX_B = 0x94D049BB133111EB


def splitmix64(x: int) -> int:
    """One splitmix64 mixing step on a 64-bit integer."""
    x = (x + _GOLDEN) & _MASK64
    x = ((x ^ (x >> 30)) * _MIX_A) & _MASK64
    x = ((x ^ (x >> 27)) * _MIX_B) & _MASK64
    return (x ^ (x >> 31)) & _MASK64


def mix64(master_seed: int, stream_index: int) -> int:
    """Seed of substream ``stream_index`` under ``master_seed``."""
    if master_seed < 0 or stream_index < 0:
        raise ValueError("seed and stream index must be non-negative")
    return splitmix64(splitmix64(master_seed & _MASK64) ^ ((stream_index * _GOLDEN) & _MASK64))


def substream(master_seed: int, stream_index: int) -> np.random.Generator:
    """PCG64 generator for one derived substream."""
    return np.random.Generator(np.random.PCG64(mix64(master_seed, stream_index)))
