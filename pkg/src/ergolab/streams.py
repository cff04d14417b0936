"""Counter-based symbol streams.

A SymbolStream maps (seed, index) to a symbol through the splitmix64
output function, so any index can be evaluated in O(1) from any thread and
the same (seed, index) always produces the same symbol.  Symbol
probabilities are realized as cumulative u64 thresholds on the mixed
64-bit word.

All seeds in a run derive from one root seed by hashing a component tag
into it, so a config's single seed pins every stream.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ergolab._common import SM64_GAMMA, SM64_M1, SM64_M2, U64_MASK


def splitmix64(z: int) -> int:
    """Reference scalar splitmix64 output function (python ints)."""
    z = (z + SM64_GAMMA) & U64_MASK
    z = ((z ^ (z >> 30)) * SM64_M1) & U64_MASK
    z = ((z ^ (z >> 27)) * SM64_M2) & U64_MASK
    return z ^ (z >> 31)


def derive_seed(root: int, tag: str) -> int:
    """Per-component seed derived from the root seed and a text tag."""
    h = root & U64_MASK
    for byte in tag.encode("utf-8"):
        h = splitmix64(h ^ byte)
    return h


def probs_to_thresholds(probs) -> np.ndarray:
    """Cumulative probability cut points scaled to u64.

    Symbol s is emitted when the mixed word is >= thresholds[s-1] and
    < thresholds[s]; the final implicit threshold 2^64 is not stored.
    """
    probs = [float(p) for p in probs]
    if len(probs) < 1:
        raise ValueError("need at least one symbol")
    if any(p < 0 for p in probs):
        raise ValueError("negative probability")
    if abs(sum(probs) - 1.0) > 1e-12:
        raise ValueError("probabilities must sum to 1")
    cuts = []
    acc = 0.0
    for p in probs[:-1]:
        acc += p
        cuts.append(min(U64_MASK, round(acc * 2.0**64)))
    return np.asarray(cuts, dtype=np.uint64)


@dataclass(frozen=True)
class SymbolStream:
    """Deterministic i.i.d.-contract symbol source over a finite alphabet."""

    probs: tuple
    seed: int
    thresholds: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "probs", tuple(float(p) for p in self.probs))
        object.__setattr__(self, "thresholds", probs_to_thresholds(self.probs))
        object.__setattr__(self, "seed", int(self.seed) & U64_MASK)

    @property
    def alphabet_size(self) -> int:
        return len(self.probs)

    def symbol_at(self, n: int) -> int:
        """Scalar reference path, independent of the array kernels."""
        # output n of the splitmix64 stream seeded at self.seed
        raw = splitmix64((self.seed + n * SM64_GAMMA) & U64_MASK)
        s = 0
        for t in self.thresholds:
            if raw >= int(t):
                s += 1
        return s

    def symbols(self, start: int, count: int) -> np.ndarray:
        from ergolab import backend

        k = backend.get_kernels()
        return k.symbols_range(np.uint64(self.seed), start, count, self.thresholds)


def fair_binary(seed: int) -> SymbolStream:
    return SymbolStream(probs=(0.5, 0.5), seed=seed)
