"""Shared numeric constants.

These are compile-time constants for both kernel backends; changing CHUNK
changes every reduction result, so it is part of the reproducibility
contract.
"""

# Summation chunk size.  Partial sums are formed over consecutive runs of
# this many terms (Kahan-compensated), then combined in index order.
CHUNK = 4096

# 2**64 as a float and its exact reciprocal (both powers of two).
TWO64 = 18446744073709551616.0
INV_TWO64 = 1.0 / TWO64

U64_MASK = (1 << 64) - 1

# splitmix64 constants
SM64_GAMMA = 0x9E3779B97F4A7C15
SM64_M1 = 0xBF58476D1CE4E5B9
SM64_M2 = 0x94D049BB133111EB

# Fixed default seed so canned runs reproduce bit for bit; the CLI can
# override it per config.
DEFAULT_SEED = 2654435769
